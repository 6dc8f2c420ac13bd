"""
Configuration Settings
Dense Survival Forest Subgroup Profiler
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent


class Settings:
    """Application configuration settings"""

    # Environment
    ENV: str = os.getenv("ENV", "development")
    DEBUG: bool = ENV == "development"

    # Application Settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    SHOW_PROGRESS: bool = os.getenv("SHOW_PROGRESS", "1") not in ("0", "false", "False")

    # Directories
    DATA_DIR: Path = BASE_DIR / "data"
    OUTPUT_DIR: Path = Path(os.getenv("OUTPUT_DIR", str(DATA_DIR / "output")))
    LOGS_DIR: Path = Path(os.getenv("LOGS_DIR", str(BASE_DIR / "logs")))

    # Performance Settings
    MAX_WORKERS: int = int(os.getenv("MAX_WORKERS", "1"))

    # Pipeline defaults
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "20240101"))
    DEFAULT_ALPHA: float = float(os.getenv("DEFAULT_ALPHA", "0.01"))
    DEFAULT_K_MIN: int = int(os.getenv("DEFAULT_K_MIN", "2"))
    DEFAULT_K_MAX: int = int(os.getenv("DEFAULT_K_MAX", "7"))
    DEFAULT_MIN_LEAF_SIZE: int = int(os.getenv("DEFAULT_MIN_LEAF_SIZE", "120"))
    DEFAULT_N_PERM: int = int(os.getenv("DEFAULT_N_PERM", "100"))
    DEFAULT_GRADIENT_REPLICATES: int = 50

    # Cox partial-likelihood solver
    COX_MAX_ITER: int = 25
    COX_SCORE_TOL: float = 1e-7
    COX_STEP_TOL: float = 1e-8
    COX_DIVERGENCE_BOUND: float = 15.0
    COX_MAX_HALVINGS: int = 30

    # Split search budget (one Cox fit per candidate)
    SPLIT_COX_MAX_ITER: int = 15
    SPLIT_COX_TOL: float = 1e-6

    # Simulation defaults (time unit = day, 1 month = 30 days)
    DAYS_PER_MONTH: int = 30
    WEIBULL_SHAPE: float = 2.0
    WEIBULL_SCALE: float = 300.0
    RANDOM_CENSOR_RATE: float = 4e-4

    # Gradient plot grid
    GRADIENT_LOW: float = -1.5
    GRADIENT_HIGH: float = 1.5
    GRADIENT_SPACING: float = 0.01

    # CSV Settings
    CSV_ENCODING: str = "utf-8"
    CSV_DELIMITER: str = ","
    CATEGORICAL_MAX_LEVELS: int = 10

    def __init__(self):
        """Initialize settings and create necessary directories"""
        self._create_directories()
        self._validate_settings()

    def _create_directories(self):
        """Create necessary directories if they don't exist"""
        directories = [
            self.OUTPUT_DIR,
            self.LOGS_DIR,
        ]
        for directory in directories:
            directory.mkdir(parents=True, exist_ok=True)

    def _validate_settings(self):
        """Validate critical settings"""
        if not 0.0 < self.DEFAULT_ALPHA < 1.0:
            raise ValueError("DEFAULT_ALPHA must lie strictly between 0 and 1")

        if self.DEFAULT_K_MIN < 2 or self.DEFAULT_K_MIN > self.DEFAULT_K_MAX:
            raise ValueError("DEFAULT_K_MIN must be >= 2 and <= DEFAULT_K_MAX")

        if self.MAX_WORKERS < 1:
            raise ValueError("MAX_WORKERS must be at least 1")

        if self.DEFAULT_MIN_LEAF_SIZE < 1:
            raise ValueError("DEFAULT_MIN_LEAF_SIZE must be positive")


# Global settings instance
settings = Settings()
