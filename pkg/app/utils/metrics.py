from contextlib import contextmanager

from prometheus_client import Counter, Summary


solver_runs_total = Counter(
    "toeplitz_solver_runs_total",
    "Total number of convex program solves",
    ["program", "status"]
)

solver_cuts_total = Counter(
    "toeplitz_solver_cuts_total",
    "Total number of eigenvalue cuts added by the cutting-plane solver",
    ["program"]
)

operation_errors_total = Counter(
    "toeplitz_operation_errors_total",
    "Total number of failed operations",
    ["operation", "error_type"]
)

operation_duration_seconds = Summary(
    "toeplitz_operation_duration_seconds",
    "Time spent in numerical operations",
    ["operation"]
)


@contextmanager
def timed(operation: str):
    with operation_duration_seconds.labels(operation=operation).time():
        try:
            yield
        except Exception as e:
            operation_errors_total.labels(
                operation=operation,
                error_type=type(e).__name__
            ).inc()
            raise
