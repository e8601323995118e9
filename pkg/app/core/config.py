# app/core/config.py
import pathlib
import logging
from typing import Dict, Literal
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache

logger = logging.getLogger("app.core.config")  # Logger for this module

BASE_DIR = pathlib.Path(__file__).resolve().parent.parent.parent

class Settings(BaseSettings):
    PROJECT_NAME: str = "Promise Goal Reasoning Executive"
    API_V1_STR: str = "/api/v1"

    DATA_DIR: pathlib.Path = BASE_DIR / "app" / "data"
    SCENARIO_DIR: pathlib.Path = BASE_DIR / "scenarios"
    # Where `run` and `batch` write events.jsonl / report.txt / gantt.txt
    OUTPUT_DIR: pathlib.Path = BASE_DIR / "runs"

    # 1 tick = 100 ms of simulated time
    TICK_MS: int = 100

    # --- Planner ---
    PLANNER_MODE: Literal["greedy", "uniform"] = "greedy"
    PLANNER_NODE_BUDGET: int = 200_000
    PLANNER_TIME_BOUND: int = 5_000  # ticks

    # --- Execution monitoring ---
    PENDING_TIMEOUT: int = 300  # 30 s
    PROMISE_MULTIPLIER: float = 2.0
    MAX_RETRIES: int = 0

    # --- Promises ---
    FORMULATION_MODE: Literal["optimistic", "pessimistic"] = "optimistic"
    # A promise elapsed by more than this many ticks without its literal holding is stale
    STALENESS_GRACE: int = 1

    # --- Goal selection ---
    # Added to the class priority for every bound object; the second machine of the chain wins ties
    OBJECT_PRIORITY: Dict[str, int] = {"M2": 1}

    # --- Coordination ---
    # When true a promise-dependent goal also defers on holders that did not issue its promises
    DEFER_ON_ANY_HOLDER: bool = False
    LOCK_LATENCY: int = 0
    WORLD_LATENCY: int = 0

    PARALLEL_FORMULATION: bool = False
    BATCH_SEEDS: int = 5

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

@lru_cache()
def get_settings():
    settings_instance = Settings()
    logger.info(f"Scenario directory set to: {settings_instance.SCENARIO_DIR}")
    return settings_instance

settings = get_settings()
