"""
Configuration settings for the platoon route planner.
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application settings
    PROJECT_NAME: str = "Platoon Route Planner"
    PROJECT_DESCRIPTION: str = (
        "Joint master/member route optimization for vehicle platoons"
    )
    VERSION: str = "0.1.0"
    APP_ENV: str = "development"

    # Processing settings
    MAX_WORKERS: int = 1

    # Network generation settings
    GRAPH_MAX_RETRIES: int = 50
    CONNECTIVITY_THRESHOLD: float = 0.9
    MIN_EDGE_DISTANCE: float = 1.0

    # Simulation settings
    DESTINATION_MAX_RETRIES: int = 100

    # Logging settings
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Pydantic settings configuration
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", case_sensitive=True
    )


# Create settings instance
settings = Settings()
