import logging

from dotenv import load_dotenv

load_dotenv()


import uvicorn
from fastapi import FastAPI, Response
from app.api import circulant, decompose, distance, factor, geometry3, propagation, state
from app.core.config import settings
from fastapi.middleware.cors import CORSMiddleware
from prometheus_client import generate_latest, CONTENT_TYPE_LATEST

logging.basicConfig(level=settings.log_level)

app = FastAPI(title="Toeplitz Operator System API", version="1.0.0")


@app.get("/metrics")
def metrics():
    return Response(content=generate_latest(), media_type=CONTENT_TYPE_LATEST)


app.include_router(factor.router)
app.include_router(decompose.router)
app.include_router(state.router)
app.include_router(distance.router)
app.include_router(circulant.router)
app.include_router(propagation.router)
app.include_router(geometry3.router)

origins = ["*"]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


if __name__ == "__main__":
    uvicorn.run("app.main:app", host=settings.server_host, port=settings.server_port, reload=True)
