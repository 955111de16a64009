import sys
from datetime import datetime

from loguru import logger as _logger

from app.config import PROJECT_ROOT, config


_print_level = "INFO"


def define_log_level(
    print_level="INFO", logfile_level="DEBUG", name: str = None, to_file: bool = False
):
    """Adjust the log level to above level"""
    global _print_level
    _print_level = print_level

    _logger.remove()
    _logger.add(sys.stderr, level=print_level)

    if to_file:
        current_date = datetime.now()
        formatted_date = current_date.strftime("%Y%m%d%H%M%S")
        log_name = (
            f"{name}_{formatted_date}" if name else formatted_date
        )  # name a log with prefix name
        _logger.add(PROJECT_ROOT / f"logs/{log_name}.log", level=logfile_level)
    return _logger


logger = define_log_level(
    print_level=config.logging.print_level,
    logfile_level=config.logging.logfile_level,
    name="causal-switch",
    to_file=config.logging.to_file,
)
