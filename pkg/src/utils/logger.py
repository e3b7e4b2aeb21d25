#src/utils/logger.py
"""Console logging for the library plus a Markdown audit trail of fit runs.

Module loggers hang under the `convex_ensemble` root and tag their messages
with the stage in brackets ("[QP] ...", "[CV] ..."). The console handler goes
to stderr so CSV/JSON written to stdout by the CLI stays parseable."""

import logging
import os
import sys
from datetime import datetime
from logging.handlers import TimedRotatingFileHandler

ROOT_LOGGER = "convex_ensemble"


def get_logger(name):
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_console(verbosity=0):
    """0 -> WARNING, 1 -> INFO, 2+ -> DEBUG."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(level)
    console = [h for h in root.handlers if getattr(h, "_convex_console", False)]
    if console:
        # sys.stderr may have been swapped since the handler was created
        console[0].stream = sys.stderr
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
        handler._convex_console = True
        root.addHandler(handler)
    return root


class AuditLogger:
    def __init__(self, log_dir="logs/audit"):
        os.makedirs(log_dir, exist_ok=True)
        self.log_dir = log_dir

        self.handler = TimedRotatingFileHandler(
            filename=os.path.join(log_dir, "audit_log.md"),
            when="midnight",
            interval=1,
            backupCount=30,
            encoding="utf-8",
        )
        self.handler.setFormatter(logging.Formatter("%(message)s"))

        # One logger per directory, so two audit dirs never share handlers
        self.logger = logging.getLogger(f"{ROOT_LOGGER}.audit.{os.path.abspath(log_dir)}")
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False
        if not self.logger.handlers:
            self.logger.addHandler(self.handler)
        else:
            self.handler.close()
            self.handler = self.logger.handlers[0]

    def log_snapshot(self, body_md, event_type="ON_DEMAND"):
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        entry = [
            "---",
            f"### Event: {event_type}",
            f"**Timestamp:** {timestamp}",
            f"\n{body_md}",
            "\n---",
        ]
        self.logger.info("\n".join(entry))
        self.handler.flush()

    def close(self):
        self.logger.removeHandler(self.handler)
        self.handler.close()
