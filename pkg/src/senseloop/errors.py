"""Exception hierarchy for the senseloop workbench."""


class SenseloopError(Exception):
    """Base class for all workbench errors."""


class NonPositiveDt(SenseloopError):
    pass


class InvalidCommand(SenseloopError):
    pass


class UnstableStep(SenseloopError):
    pass


class DegenerateTriangle(SenseloopError):
    pass


class CollinearBasis(SenseloopError):
    pass


class OutOfWorkspace(SenseloopError):
    pass


class ShiftTooLarge(SenseloopError):
    pass


class IncompleteDataset(SenseloopError):
    pass


class EmptyModel(SenseloopError):
    pass


class CodeOutOfRange(SenseloopError):
    pass


class MissingEntry(SenseloopError):
    pass


class IndexOutOfRange(SenseloopError):
    pass


class ZeroLikelihood(SenseloopError):
    pass


class ConfigError(SenseloopError):
    """Bad or missing run configuration."""
