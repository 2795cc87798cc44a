"""Python access to the EMAS engines."""

from ._emas import ConfigError, RunTrace, aggregate, rastrigin, run

__all__ = ["ConfigError", "RunTrace", "aggregate", "rastrigin", "run"]
