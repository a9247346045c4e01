"""
Configuration settings for the LAMP significant pattern miner
"""

import os
from typing import List
from dotenv import load_dotenv

load_dotenv()


def _int_list(raw: str) -> List[int]:
    return [int(token) for token in raw.replace(" ", "").split(",") if token]


class Settings:
    # Application
    APP_TITLE: str = "lamp-miner"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = "Significant itemset mining with Tarone's testability bound"

    # Search defaults
    ALPHA: float = float(os.getenv("LAMP_ALPHA", 0.05))
    DEFAULT_STRATEGY: str = os.getenv("LAMP_STRATEGY", "inc")
    DEFAULT_TAIL: str = os.getenv("LAMP_TAIL", "one")
    THREADS: int = int(os.getenv("LAMP_THREADS", 1))

    # Input handling
    REMAP_ITEM_IDS: bool = os.getenv("LAMP_REMAP_ITEMS", "true").lower() == "true"

    # Subsampling defaults
    DEFAULT_SEED: int = int(os.getenv("LAMP_SEED", 0))
    DEFAULT_REPS: int = int(os.getenv("LAMP_REPS", 10))
    RNG_ALGORITHM: str = "PCG64"

    # Oracle guard
    BRUTE_FORCE_MAX_ITEMS: int = int(os.getenv("BRUTE_FORCE_MAX_ITEMS", 20))

    # Statistics
    LOG_FACTORIAL_TABLE_SIZE: int = int(os.getenv("LOG_FACTORIAL_TABLE_SIZE", 100000))

    # Output
    OUTPUT_DIR: str = os.getenv("LAMP_OUTPUT_DIR", "results")
    P_VALUE_DIGITS: int = int(os.getenv("P_VALUE_DIGITS", 12))
    NAIVE_ORDERS: List[int] = _int_list(os.getenv("NAIVE_ORDERS", "3,5,7,9"))

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Output file names
    PATTERNS_FILE: str = "patterns.tsv"
    SUMMARY_FILE: str = "summary.json"
    ESTIMATE_FILE: str = "estimate.json"
    COMPARE_FILE: str = "compare.tsv"

    @classmethod
    def validate_settings(cls) -> bool:
        """Validate that configured defaults are usable"""
        from config.mappings import STRATEGY_ALIASES, TAIL_ALIASES

        if not 0.0 < cls.ALPHA < 1.0:
            raise ValueError(f"LAMP_ALPHA must lie in (0, 1), got {cls.ALPHA}")
        if cls.THREADS < 1:
            raise ValueError(f"LAMP_THREADS must be at least 1, got {cls.THREADS}")
        if cls.DEFAULT_STRATEGY not in STRATEGY_ALIASES:
            raise ValueError(f"Unknown LAMP_STRATEGY {cls.DEFAULT_STRATEGY!r}")
        if cls.DEFAULT_TAIL not in TAIL_ALIASES:
            raise ValueError(f"Unknown LAMP_TAIL {cls.DEFAULT_TAIL!r}")
        if any(order < 1 for order in cls.NAIVE_ORDERS):
            raise ValueError("NAIVE_ORDERS must be positive integers")
        return True


# Create settings instance
settings = Settings()

# Validate settings on import
settings.validate_settings()
