"""Custom exceptions for the subband DBP toolkit."""


class DbpToolkitError(Exception):
    """Base exception for the subband DBP toolkit."""

    pass


class ConfigurationError(DbpToolkitError, ValueError):
    """Configuration related errors."""

    pass


class SignalError(DbpToolkitError, ValueError):
    """Invalid waveform, symbol sequence or signal specification."""

    pass


class ChannelError(DbpToolkitError, ValueError):
    """Fiber channel simulation errors."""

    pass


class FilterBankError(DbpToolkitError, ValueError):
    """Filter bank design or processing errors."""

    pass


class EngineError(DbpToolkitError, ValueError):
    """Inconsistent step plan, parameters or MIMO dimensions."""

    pass


class TapeError(DbpToolkitError):
    """Reverse-mode differentiation errors."""

    pass


class TapeReplayError(TapeError):
    """Replaying a tape did not reproduce the recorded forward values."""

    pass


class DigestMismatchError(DbpToolkitError):
    """Artifacts were produced under a different configuration."""

    pass


class ContainerError(DbpToolkitError, OSError):
    """Dataset / checkpoint container I/O errors."""

    pass
