import os
import logging
from pathlib import Path

logger = logging.getLogger(__name__)


class RunConfig:
    APP_NAME = "ConstrainedMFG"
    APP_VERSION = "1.0.0"
    PROJECT_ROOT = Path(__file__).parent.parent.parent
    LOG_DIR = PROJECT_ROOT / "logs"
    LOG_FILE = "solver.log"
    DATA_DIR = PROJECT_ROOT / "data"
    RUNS_DB_FILE = "equilibrium_runs.db"
    SCENARIO_DIR = PROJECT_ROOT / "scenarios"
    ENV_NUM_THREADS = "MFG_NUM_THREADS"
    ENV_RUNS_DB = "MFG_RUNS_DB"
    MAX_DEFAULT_THREADS = 8

    @staticmethod
    def num_threads() -> int:
        raw = os.environ.get(RunConfig.ENV_NUM_THREADS)
        if raw is None:
            return max(1, min(RunConfig.MAX_DEFAULT_THREADS, os.cpu_count() or 1))
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value < 1:
            logger.warning(f"Ignoring {RunConfig.ENV_NUM_THREADS}={raw!r}, running single-threaded")
            return 1
        return value

    @staticmethod
    def runs_db_path() -> str:
        raw = os.environ.get(RunConfig.ENV_RUNS_DB)
        if raw:
            return raw
        return str(RunConfig.DATA_DIR / RunConfig.RUNS_DB_FILE)
