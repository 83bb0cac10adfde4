"""Console logging for experiments and long running solvers."""

import logging

from stablelab.config import LogLevelEnum, get_settings

LOG_FORMAT = (
    "%(asctime)s %(levelname)s %(name)s "
    "[%(processName)s: %(process)d - %(threadName)s: %(thread)d] %(message)s"
)


def get_logger(
    name: str = "stablelab", log_level: LogLevelEnum | int | None = None
) -> logging.Logger:
    """Return the named logger writing to stderr.

    Only one stream handler is attached per name, so solvers and the runner can
    ask for the same logger repeatedly. Calling again only updates the level.

    Args:
        name: Logger name. Defaults to "stablelab".
        log_level (LogLevelEnum | int): Level of the logger. Defaults to
            Settings.LOG_LEVEL.

    Returns:
        logging.Logger: The configured logger.

    """
    logger = logging.getLogger(name)
    logger.setLevel(level=log_level or get_settings().LOG_LEVEL)
    if not any(isinstance(h, logging.StreamHandler) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger
