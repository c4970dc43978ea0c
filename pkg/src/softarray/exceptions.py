"""Exception types raised by softarray."""

import numpy as np


class DomainError(ValueError):
    """A geometric quantity was requested outside its real-valued domain."""


class InfeasibleStateError(ValueError):
    """A deformation state violates its amplitude/frequency constraints."""


class DimensionMismatchError(ValueError):
    """Array layout, path set and configuration disagree on a dimension."""


class RankDeficientChannelError(np.linalg.LinAlgError):
    """The user Gram matrix ``H H^H`` is numerically singular."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
