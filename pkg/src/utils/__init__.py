from .solver_logger import log_errors, logger
from .parallel import parallel_map

__all__ = ['log_errors', 'logger', 'parallel_map']
