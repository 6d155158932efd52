"""Exception hierarchy shared by every module."""


class SketchLSRError(Exception):
    """Base class for all errors raised by sketchlsr."""


class DomainError(SketchLSRError, ValueError):
    """An argument lies outside the domain of the operation."""


class RankError(SketchLSRError):
    """The design matrix is rank deficient under the rank tolerance.

    ``ratio`` is sigma_min / sigma_max of the offending matrix.
    """

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


class FactorizationError(SketchLSRError):
    """A dense factorization failed to converge."""

    def __init__(self, message, shape=None):
        super().__init__(message)
        self.shape = shape


class SamplingError(SketchLSRError):
    """A random sketch could not be realized (e.g. repeatedly empty)."""


class CertificateViolation(SketchLSRError):
    """A deterministic identity failed numerically during an experiment.

    This signals a correctness bug, never sampling noise.
    """

    def __init__(self, message, seed=None, stream=None):
        super().__init__(message)
        self.seed = seed
        self.stream = stream


class ParseError(SketchLSRError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(DomainError):
    """Invalid experiment configuration; ``pointer`` is a JSON pointer to the field."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
