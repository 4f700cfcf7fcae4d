import os
import logging
import warnings


def set_up_logger():
    r"""Configure the root logger.

    The log file defaults to ``fedalign.log`` in the working directory and the level to
    ``INFO``; both can be changed with the ``FEDALIGN_LOG_FILE`` and ``FEDALIGN_LOG_LEVEL``
    environment variables.
    """
    level_name = os.environ.get("FEDALIGN_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(
        filename=os.environ.get("FEDALIGN_LOG_FILE", "fedalign.log"),
        format="%(asctime)s:%(name)s:%(levelname)s: %(message)s",
        level=level,
    )


def log_entry(logger, message, level="info", print_end="\n", warning_category=Warning):
    logger_level = getattr(logger, level)
    logger_level(message)

    if level == "info":
        print(message, end=print_end)
    elif level == "warning":
        warnings.warn(message, category=warning_category)
