import argparse
import logging
import traceback
import functools
from datetime import datetime
from typing import Callable, Any
from src.config import RunConfig
from src.exceptions import ScenarioValidationError, ShapeMismatchError, InfeasibleStartError

log_dir = RunConfig.LOG_DIR
log_dir.mkdir(exist_ok=True)
log_file = log_dir / RunConfig.LOG_FILE

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(log_file),
        logging.StreamHandler()
    ]
)

logger = logging.getLogger("ConstrainedMFG.Solver")

USER_ERRORS = (ScenarioValidationError, ShapeMismatchError, InfeasibleStartError)


def _readable(args: tuple) -> list:
    return [vars(arg) if isinstance(arg, argparse.Namespace) else arg for arg in args]


def log_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except USER_ERRORS as e:
            logger.info(f"{func.__name__}: {type(e).__name__} - {e}")
            raise
        except Exception as e:
            error_time = datetime.now().isoformat()
            error_msg = f"""
{'=' * 80}
ERROR TIMESTAMP: {error_time}
FUNCTION: {func.__name__}
MODULE: {func.__module__}
ERROR TYPE: {type(e).__name__}
ERROR MESSAGE: {str(e)}

ARGUMENTS:
{_readable(args)}

KEYWORD ARGUMENTS:
{kwargs}

FULL TRACEBACK:
{traceback.format_exc()}
{'=' * 80}
"""
            logger.error(error_msg)
            raise

    return wrapper
