from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="TOEPLITZ_", env_file=".env", extra="ignore")

    gap: float = 1e-6
    tol: float = 1e-9
    quad_tol: float = 1e-8
    seed: int = 42
    max_cuts: int = 10_000
    circle_tol: float = 1e-8
    cluster_radius: float = 1e-6
    log_level: str = "INFO"
    server_host: str = "127.0.0.1"
    server_port: int = 8000


settings = Settings()
