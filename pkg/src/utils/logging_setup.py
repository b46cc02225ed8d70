"""
Logging configuration for the command-line entry point.
"""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0) -> None:
    """
    Configure root logging once for the CLI.

    Args:
        verbosity: -1 for warnings only, 0 for info, 1 or more for debug
    """
    if verbosity >= 1:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    else:
        level = logging.INFO

    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
