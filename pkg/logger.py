import logging
import os
import sys
from typing import Optional

from settings import LOG_FILE, LOG_LEVEL


def prepare_logger(level: Optional[str] = None, log_file: Optional[str] = LOG_FILE) -> logging.Logger:
    """
    Creates a logger that prints to stderr and optionally saves to file.
    Standard output is left for the JSON reports.
    """
    log_format = logging.Formatter(
        '%(asctime)s :: %(levelname)s :: %(message)s')

    logger = logging.getLogger("completion")
    if level is not None or logger.level == logging.NOTSET:
        logger.setLevel(level or LOG_LEVEL)

    if not logger.hasHandlers():
        # Console handler
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG)
        console_handler.setFormatter(log_format)
        logger.addHandler(console_handler)

    # File handler, once per path
    if log_file and not any(isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(log_file)
                            for h in logger.handlers):
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(log_format)
        logger.addHandler(file_handler)

    return logger
