import os
import sys
import logging

import yaml
from packaging import version
from mlperf_logging import mllog
from mlperf_logging.mllog import constants as log_constants

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.yaml")
MIN_CONFIG_VERSION = "1.0"


class SingletonMetaClass(type):
    _instances = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super(SingletonMetaClass, cls).__call__(*args, **kwargs)
        return cls._instances[cls]


def _when_logging(func):
    def wrapper(self, *args, **kwargs):
        if self["logging"].get("events", True):
            return func(self, *args, **kwargs)
    return wrapper


class GlobalContext(dict, metaclass=SingletonMetaClass):
    """
    reads the yaml config and stores it as its items

    being a singleton class prevents having to read the yaml file every time
    a module asks for a setting
    """
    def __init__(self, config_path=None):
        self.mllogger = mllog.get_mllogger()
        if not self:
            self.update_config(config_path or DEFAULT_CONFIG)

    def update_config(self, config_path):
        with open(config_path, "r") as stream:
            loaded = yaml.safe_load(stream) or {}
        found = str(loaded.get("version", "0"))
        if version.parse(found) < version.parse(MIN_CONFIG_VERSION):
            raise ValueError(
                "Config {} has version {}, at least {} is required".format(config_path, found, MIN_CONFIG_VERSION))
        self.clear()
        self.update(loaded)
        self._config_path = config_path
        self.configure_logging()

    def configure_logging(self):
        level = str(self["logging"].get("level", "WARNING")).upper()
        logger = logging.getLogger("TM.events")
        logger.propagate = False
        logger.setLevel(level)
        if not logger.handlers:
            logger.addHandler(logging.StreamHandler(stream=sys.stderr))
        logging.getLogger("TM").setLevel(level)
        if self["logging"].get("file"):
            mllog.config(logger=logger, filename=self["logging"]["file"])
        else:
            mllog.config(logger=logger)
        self.mllogger = mllog.get_mllogger()

    @property
    def config_path(self):
        return getattr(self, "_config_path", DEFAULT_CONFIG)

    @property
    def max_events(self):
        return int(self["behavior"]["max_events"])

    @property
    def oracle_max_events(self):
        return int(self["behavior"]["oracle_max_events"])

    @property
    def allow_simultaneity(self):
        return bool(self["behavior"]["allow_simultaneity"])

    @property
    def workers(self):
        return max(1, int(self["behavior"].get("workers", 1)))

    @property
    def progress(self):
        return bool(self["behavior"].get("progress", False))

    @property
    def max_ticks(self):
        return int(self["simulator"]["max_ticks"])

    @property
    def fork(self):
        return bool(self["simulator"].get("fork", False))

    @_when_logging
    def log_event(self, *args, **kwargs):
        self.mllogger.event(*args, **kwargs)

    @_when_logging
    def start_run(self, command):
        self.mllogger.start(key=log_constants.RUN_START, value=command)

    @_when_logging
    def stop_run(self, metadata={"status": "success"}):
        self.mllogger.end(key=log_constants.RUN_STOP, value=None, metadata=metadata)
