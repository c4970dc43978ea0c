"""Saleh-Valenzuela multipath draws and user channel assembly.

User k's channel is

    h_k = sqrt(MN / (Nc Np)) * sum_{c,p} beta * sqrt(Q_E(theta)) * a(theta, phi)

with ``a`` the per-element plane-wave phase and ``Q_E`` the cosine element
pattern.  ``ChannelMatrix.H`` stores ``h_k^H`` as its k-th row, so that
``(H @ W)[k, i] = h_k^H w_i``.

Random streams
--------------
User k of a draw with seed ``s`` uses ``numpy.random.default_rng([s, k])``,
i.e. a :class:`numpy.random.SeedSequence` keyed on the pair.  Adding users
therefore never changes the paths of existing users, and distinct
``(seed, user)`` pairs never share a stream.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError
from .geometry import DEFAULT_WAVELENGTH


@dataclass(frozen=True)
class ChannelConfig:
    """Multipath model parameters; ``directivity=None`` means omnidirectional."""

    num_users: int = 2
    num_clusters: int = 3
    paths_per_cluster: int = 10
    directivity: float = 2.0
    wavelength: float = DEFAULT_WAVELENGTH
    seed: int = 0

    def __post_init__(self):
        if min(self.num_users, self.num_clusters, self.paths_per_cluster) < 1:
            raise ValueError("users, clusters and paths per cluster must be positive")
        if self.directivity is not None and self.directivity < 1:
            raise ValueError("directivity must be >= 1 (or None for omnidirectional)")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def num_paths(self):
        return self.num_clusters * self.paths_per_cluster


@dataclass(frozen=True)
class PathSet:
    """Per-user path gains and arrival angles, each of shape ``(K, Nc*Np)``.

    Path ``p`` of cluster ``c`` sits in column ``c*Np + p``.
    """

    gains: np.ndarray
    elevations: np.ndarray
    azimuths: np.ndarray

    @property
    def num_users(self):
        return self.gains.shape[0]

    @property
    def num_paths(self):
        return self.gains.shape[1]

    def subset(self, users):
        """Paths of a subset of users, e.g. ``paths.subset(slice(0, 2))``."""
        return PathSet(self.gains[users], self.elevations[users], self.azimuths[users])


@dataclass(frozen=True)
class ChannelMatrix:
    """Rows are ``h_k^H``; columns follow the element order of :class:`ArrayLayout`."""

    H: np.ndarray

    @property
    def num_users(self):
        return self.H.shape[0]

    @property
    def num_elements(self):
        return self.H.shape[1]


def draw_paths(config):
    """Draw one multipath realisation for every user."""
    n = config.num_paths
    gains = np.empty((config.num_users, n), dtype=complex)
    elev = np.empty((config.num_users, n))
    azim = np.empty((config.num_users, n))
    for k in range(config.num_users):
        rng = np.random.default_rng([config.seed, k])
        re, im = rng.standard_normal((2, n)) * np.sqrt(0.5)
        gains[k] = re + 1j * im
        elev[k] = rng.uniform(0.0, np.pi / 2, n)
        azim[k] = rng.uniform(0.0, 2 * np.pi, n)
    return PathSet(gains, elev, azim)


def steering_entry(position, elevation, azimuth, wavelength):
    """Plane-wave phase factor of one element for one arrival direction."""
    x, y, z = position
    st = np.sin(elevation)
    proj = x * st * np.cos(azimuth) + y * st * np.sin(azimuth) + z * np.cos(elevation)
    return np.exp(-1j * (2 * np.pi / wavelength) * proj)


def element_gain(elevation, azimuth, directivity):
    """Cosine element pattern ``Q cos^kappa(theta)`` with ``Q = 2(kappa + 1)``.

    Returns 1 for an omnidirectional element (``directivity=None``) and 0
    outside ``[0, pi/2]``.  The pattern does not depend on azimuth.
    """
    elevation = np.asarray(elevation, dtype=float)
    if directivity is None:
        out = np.ones_like(elevation)
    else:
        inside = (elevation >= 0) & (elevation <= np.pi / 2)
        # Clip guards cos(pi/2) ~ 6e-17 against tiny negative rounding.
        c = np.clip(np.cos(elevation), 0.0, None)
        out = np.where(inside, 2 * (directivity + 1) * c**directivity, 0.0)
    return out[()] if out.ndim == 0 else out


def _positions(layout):
    return np.asarray(getattr(layout, "positions", layout), dtype=float)


def direction_vectors(paths):
    """Unit arrival directions, shape ``(K, P, 3)``."""
    st = np.sin(paths.elevations)
    return np.stack(
        [st * np.cos(paths.azimuths), st * np.sin(paths.azimuths), np.cos(paths.elevations)],
        axis=-1,
    )


def path_terms(layout, paths, config):
    """Per-path contributions to every channel entry, shape ``(K, P, MN)``.

    ``path_terms(...).sum(axis=1)`` is ``h_k`` (not conjugated).
    """
    pos = _positions(layout)
    if paths.num_users != config.num_users or paths.num_paths != config.num_paths:
        raise DimensionMismatchError(
            f"path set is {paths.num_users}x{paths.num_paths}, config expects "
            f"{config.num_users}x{config.num_paths}"
        )
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise DimensionMismatchError(f"positions must be (MN, 3), got {pos.shape}")
    scale = np.sqrt(pos.shape[0] / config.num_paths)
    amp = scale * paths.gains * np.sqrt(element_gain(paths.elevations, paths.azimuths,
                                                     config.directivity))
    phase = direction_vectors(paths) @ pos.T
    return amp[..., None] * np.exp(-1j * (2 * np.pi / config.wavelength) * phase)


def assemble_channel(layout, paths, config):
    """Stack the user channels of a layout into a :class:`ChannelMatrix`."""
    return ChannelMatrix(np.conj(path_terms(layout, paths, config).sum(axis=1)))
