"""A module providing configuration variables."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseConfig(BaseSettings):
    """A class containing base settings configuration."""
    model_config = SettingsConfigDict(env_prefix="FACEPNP_", env_file=".env", extra="ignore")


class AppConfig(BaseConfig):
    """A class containing the solver, pipeline and runtime configuration."""
    LOG_LEVEL: str = "INFO"
    WORKERS: int = 1

    LM_MAX_ITERATIONS: int = 100
    LM_GRADIENT_TOL: float = 1e-10
    LM_STEP_TOL: float = 1e-12
    LM_INITIAL_DAMPING: float = 1e-3
    LM_DAMPING_FACTOR: float = 10.0
    HESSIAN_FLOOR: float = 1e-10
    WEIGHTED_PNP: bool = True

    EYE_LEFT_INDEX: int = 0
    EYE_RIGHT_INDEX: int = 1
    CROP_SIZE: int = 256
    CROP_FILL: float = 0.8


config = AppConfig()
