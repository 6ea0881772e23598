import logging
import sys

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity=0):
    """Route all g2pstack loggers to stderr.

    verbosity < 0 keeps warnings only, 0 is INFO, > 0 is DEBUG.
    """
    if verbosity < 0:
        level = logging.WARNING
    elif verbosity == 0:
        level = logging.INFO
    else:
        level = logging.DEBUG

    root = logging.getLogger("g2pstack")
    root.setLevel(level)
    # Replace handlers so repeated CLI calls in one process don't duplicate output
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.propagate = False
    return root


def get_logger(name):
    return logging.getLogger(name if name.startswith("g2pstack") else f"g2pstack.{name}")
