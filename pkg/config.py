# =========================================================
# config.py - CONFIGURATION AND LOGGING HELPERS
# Limits are read from the environment (and an optional .env file)
# =========================================================

import os
import logging
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

ORACLE_BACKENDS = ("bruteforce", "search", "auto")

# =========================================================
# CONFIGURATION CLASSES
# =========================================================


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger("selp.config").warning(
            "⚠️  %s=%r is not an integer, using %d", name, raw, default)
        return default


class SolverConfig:
    """Caps and budgets for the oracle, the grounder and the QBF tools"""

    def __init__(self, **overrides):
        self.max_oracle_atoms = _env_int("SELP_MAX_ORACLE_ATOMS", 20)
        self.max_oracle_elits = _env_int("SELP_MAX_ORACLE_ELITS", 16)
        self.oracle_backend = os.getenv("SELP_ORACLE_BACKEND", "bruteforce")
        self.max_ground_rules = _env_int("SELP_MAX_GROUND_RULES", 2_000_000)
        self.max_ground_atoms = _env_int("SELP_MAX_GROUND_ATOMS", 100_000)
        self.max_qbf_vars = _env_int("SELP_MAX_QBF_VARS", 20)
        self.log_level = os.getenv("SELP_LOG_LEVEL", "WARNING")

        for key, value in overrides.items():
            if not hasattr(self, key):
                raise TypeError(f"unknown configuration key: {key}")
            setattr(self, key, value)

        if self.oracle_backend not in ORACLE_BACKENDS:
            raise ValueError(
                f"SELP_ORACLE_BACKEND must be one of {ORACLE_BACKENDS}, "
                f"got {self.oracle_backend!r}")

    def replace(self, **overrides) -> "SolverConfig":
        """Copy of this configuration with some fields changed"""
        fresh = SolverConfig.__new__(SolverConfig)
        fresh.__dict__.update(self.__dict__)
        for key, value in overrides.items():
            if not hasattr(fresh, key):
                raise TypeError(f"unknown configuration key: {key}")
            setattr(fresh, key, value)
        return fresh

    @staticmethod
    def get_engine_config(engine: str) -> dict:
        """Per-engine settings used by the solve command"""
        engine_settings = {
            "oracle": {
                "label": "brute-force oracle",
                "needs_grounding": False,
            },
            "reduce": {
                "label": "reduction + internal grounder/solver",
                "needs_grounding": True,
            },
        }
        if engine not in engine_settings:
            raise ValueError(f"unknown engine: {engine}")
        return engine_settings[engine]

    def __repr__(self):
        return (f"<SolverConfig atoms={self.max_oracle_atoms} "
                f"elits={self.max_oracle_elits} backend={self.oracle_backend} "
                f"rules={self.max_ground_rules} ground_atoms={self.max_ground_atoms}>")


config = SolverConfig()


def resolve(cfg: Optional[SolverConfig]) -> SolverConfig:
    return cfg if cfg is not None else config

# =========================================================
# LOGGING HELPERS
# =========================================================

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Logger below the shared 'selp' root, with one stderr handler"""
    root = logging.getLogger("selp")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        root.addHandler(handler)
        root.setLevel(config.log_level.upper())
        root.propagate = False
    return logging.getLogger(f"selp.{name}")


def set_log_level(level: str):
    get_logger("config")
    logging.getLogger("selp").setLevel(level.upper())


def log_activity(component: str, action: str, details: str = ""):
    """Record a pipeline milestone"""
    logger = get_logger(component)
    if details:
        logger.info("✅ %s: %s", action, details)
    else:
        logger.info("✅ %s", action)
