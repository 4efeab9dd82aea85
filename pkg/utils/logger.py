import os
import sys
import time
import os.path as osp

__all__ = ["Logger", "setup_logger"]


class Logger:
    """Tee console output into a text file.

    Args:
        fpath (str): path of the log file; ``None`` only echoes to the console.

    Examples::
       >>> sys.stdout = Logger(osp.join("output/sphere", "log.txt"))
    """

    def __init__(self, fpath=None):
        self.console = sys.stdout
        self.file = None
        if fpath is not None:
            os.makedirs(osp.dirname(fpath) or ".", exist_ok=True)
            self.file = open(fpath, "w")

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()

    def write(self, msg):
        self.console.write(msg)
        if self.file is not None:
            self.file.write(msg)

    def flush(self):
        self.console.flush()
        if self.file is not None:
            self.file.flush()

    def close(self):
        # the console is not ours to close
        if self.file is not None:
            self.file.close()
            self.file = None


def setup_logger(output=None):
    """Tee stdout into ``<output>/log.txt``; returns the Logger or None."""
    if output is None:
        return None

    if output.endswith(".txt") or output.endswith(".log"):
        fpath = output
    else:
        fpath = osp.join(output, "log.txt")

    if osp.exists(fpath):
        # make sure the existing log file is not over-written
        fpath += time.strftime("-%Y-%m-%d-%H-%M-%S")

    logger = Logger(fpath)
    sys.stdout = logger
    return logger
