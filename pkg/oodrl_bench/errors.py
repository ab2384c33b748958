"""Exception hierarchy for OODRL Bench"""


class OodBenchError(Exception):
    """Base class for all benchmark errors"""
    pass


class SpecError(OodBenchError, ValueError):
    """Raised when a network or corruption description is invalid"""
    pass


class ShapeError(OodBenchError, ValueError):
    """Raised when array dimensions do not match"""
    pass


class UsageError(OodBenchError, RuntimeError):
    """Raised when an object is used out of order (stale tape, finished episode)"""
    pass


class TrainingError(OodBenchError, RuntimeError):
    """Raised when training produces non-finite values or diverges"""
    pass


class ConfigError(OodBenchError, ValueError):
    """Raised when configuration or parameter names are invalid"""
    pass


class MethodError(OodBenchError, ValueError):
    """Raised when an uncertainty method does not fit the model it is given"""
    pass


class DataError(OodBenchError, ValueError):
    """Raised when evaluation input data is empty or malformed"""
    pass


class CheckpointError(OodBenchError, ValueError):
    """Raised when a checkpoint file is missing or unreadable"""
    pass


__all__ = [
    "OodBenchError",
    "SpecError",
    "ShapeError",
    "UsageError",
    "TrainingError",
    "ConfigError",
    "MethodError",
    "DataError",
    "CheckpointError",
]
