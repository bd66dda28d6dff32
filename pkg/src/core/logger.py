"""
Logging configuration for the laboratory.
Console output with colours, rotating plain-text files and a JSON stream
for structured events (quadrature calls, solver progress, fits).
"""
import logging
import sys
import json
from datetime import datetime
from typing import Optional, Dict, Any
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path

from config.settings import settings

# Attributes every LogRecord carries; anything else came in through ``extra=``.
_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "asctime"}


class StructuredFormatter(logging.Formatter):
    """JSON formatter for structured logging"""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
            "process": record.process,
            "thread": record.threadName
        }

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        for key, value in vars(record).items():
            if key not in _RESERVED:
                log_entry[key] = value

        return json.dumps(log_entry, default=str)


class ColorFormatter(logging.Formatter):
    """Color formatter for console output"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[41m',
        'RESET': '\033[0m'
    }

    def format(self, record: logging.LogRecord) -> str:
        level_color = self.COLORS.get(record.levelname, self.COLORS['RESET'])
        formatted = super().format(record)
        return f"{level_color}{formatted}{self.COLORS['RESET']}"


class LabLogger:
    """
    Named logger wrapper shared by every module of the package.
    One instance per name; handlers are attached once.
    """

    _loggers: Dict[str, 'LabLogger'] = {}

    def __init__(self, name: str, log_dir: Optional[str] = None, level: Optional[str] = None):
        self.name = name
        self.log_dir = Path(log_dir or settings.log_dir)
        self.level = getattr(logging, (level or settings.log_level).upper())

        self.logger = logging.getLogger(name)
        self.logger.setLevel(self.level)
        self.logger.propagate = False
        self.logger.handlers.clear()

        self._setup_handlers()

    @classmethod
    def get_logger(cls, name: str = __name__, **kwargs) -> 'LabLogger':
        """Get or create logger instance"""
        if name not in cls._loggers:
            cls._loggers[name] = cls(name, **kwargs)
        return cls._loggers[name]

    def _setup_handlers(self):
        # Console goes to stderr so CLI stdout stays machine-readable
        console_handler = logging.StreamHandler(sys.stderr)
        console_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        console_handler.setFormatter(ColorFormatter(console_format, datefmt='%Y-%m-%d %H:%M:%S'))
        console_handler.setLevel(self.level)
        self.logger.addHandler(console_handler)

        if not settings.log_to_file:
            return

        self.log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            self.log_dir / "fkpp_lab.log",
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding='utf-8'
        )
        file_format = '%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(funcName)s:%(lineno)d - %(message)s'
        file_handler.setFormatter(logging.Formatter(file_format, datefmt='%Y-%m-%d %H:%M:%S'))
        file_handler.setLevel(logging.DEBUG)
        self.logger.addHandler(file_handler)

        json_handler = TimedRotatingFileHandler(
            self.log_dir / "fkpp_lab_structured.json",
            when='midnight',
            interval=1,
            backupCount=7,
            encoding='utf-8'
        )
        json_handler.setFormatter(StructuredFormatter())
        json_handler.setLevel(logging.INFO)
        self.logger.addHandler(json_handler)

    def set_level(self, level: str):
        """Set logging level"""
        self.level = getattr(logging, level.upper())
        self.logger.setLevel(self.level)
        for handler in self.logger.handlers:
            if type(handler) is logging.StreamHandler:
                handler.setLevel(self.level)

    @classmethod
    def set_global_level(cls, level: str):
        """Apply a level to every registered logger and to those created later"""
        getattr(logging, level.upper())
        settings.log_level = level.upper()
        for instance in cls._loggers.values():
            instance.set_level(level)

    def log_quadrature(self, kind: str, value: float, err_est: float, evaluations: int):
        """Log one finished integral"""
        self.logger.debug(f"{kind}: value={value:.16g} err={err_est:.3g} ({evaluations} evals)", extra={
            "event": "quadrature",
            "kind": kind,
            "value": value,
            "err_est": err_est,
            "evaluations": evaluations
        })

    def log_run_progress(self, t: float, step: int, umin: float, umax: float, edge_max: float):
        """Log solver progress at a snapshot"""
        self.logger.info(f"t={t:.4g} step={step} u in [{umin:.3g}, {umax:.3g}] edge={edge_max:.3g}", extra={
            "event": "run_progress",
            "t": t,
            "step": step,
            "umin": umin,
            "umax": umax,
            "edge_max": edge_max
        })

    def log_fit(self, level: float, sigma_linear: Optional[float], sigma_exp: Optional[float],
                crossover_time: Optional[float]):
        """Log a regime fit"""
        self.logger.info(
            f"fit level={level}: sigma_linear={sigma_linear} sigma_exp={sigma_exp} crossover={crossover_time}",
            extra={
                "event": "fit",
                "level": level,
                "sigma_linear": sigma_linear,
                "sigma_exp": sigma_exp,
                "crossover_time": crossover_time
            })

    def log_performance(self, metric: str, value: float, threshold: float = None):
        """Log performance metric"""
        extra = {
            "event": "performance",
            "metric": metric,
            "value": value
        }

        if threshold is not None:
            extra["threshold"] = threshold
            extra["within_limit"] = value <= threshold

            if value > threshold:
                self.logger.warning(f"Performance threshold exceeded: {metric}={value:.2f} > {threshold}", extra=extra)
            else:
                self.logger.info(f"Performance OK: {metric}={value:.2f} <= {threshold}", extra=extra)
        else:
            self.logger.info(f"Performance: {metric}={value:.2f}", extra=extra)

    def debug(self, msg: str, **kwargs):
        self.logger.debug(msg, extra=kwargs)

    def info(self, msg: str, **kwargs):
        self.logger.info(msg, extra=kwargs)

    def warning(self, msg: str, **kwargs):
        self.logger.warning(msg, extra=kwargs)

    def error(self, msg: str, **kwargs):
        self.logger.error(msg, extra=kwargs)


logger = LabLogger.get_logger("fkpp_lab")
