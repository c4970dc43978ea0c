"""Tentacle curves and antenna element positions.

Each tentacle m is a curve of fixed arc length ``L_max`` lying over the ray
at azimuth ``2*pi*m/M`` (m = 1..M).  A vertical sinusoid
``z(l) = A sin(phase + v l)`` lifts it out of the plane, and the planar
footprint shrinks to

    u(l) = int_0^l sqrt(1 - (A v cos(v s + phase))^2) ds

so that ``l`` stays the true arc-length parameter.  Antenna element n sits
at ``l_n = n L_max / N``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exceptions import DomainError, InfeasibleStateError

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 1.2e9
DEFAULT_WAVELENGTH = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ
DEFAULT_TOL = 1e-10

# Slack on the |A v| <= 1 boundary so that e.g. A = A_max, v = 1/A_max passes.
_BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class ArrayConstants:
    """Fixed physical parameters of the tentacle array.

    ``total_arc_length`` defaults to ``N * wavelength / 2``.  ``phase`` is
    the constant oscillation phase of every tentacle; it is never optimised.
    """

    num_tentacles: int = 8
    elements_per_tentacle: int = 4
    wavelength: float = DEFAULT_WAVELENGTH
    total_arc_length: float = None
    amplitude_bound: float = 0.2
    spatial_freq_bound: float = 5.0
    phase: float = 0.0

    def __post_init__(self):
        if self.total_arc_length is None:
            object.__setattr__(
                self, "total_arc_length", self.elements_per_tentacle * self.wavelength / 2
            )
        if self.num_tentacles < 1 or self.elements_per_tentacle < 1:
            raise ValueError("need at least one tentacle and one element per tentacle")
        if self.total_arc_length <= 0 or self.wavelength <= 0:
            raise ValueError("arc length and wavelength must be positive")
        if self.amplitude_bound < 0 or self.spatial_freq_bound < 0:
            raise ValueError("deformation bounds must be non-negative")

    @property
    def num_elements(self):
        return self.num_tentacles * self.elements_per_tentacle

    @property
    def arc_positions(self):
        n = np.arange(1, self.elements_per_tentacle + 1)
        return n / self.elements_per_tentacle * self.total_arc_length

    @property
    def azimuths(self):
        m = np.arange(1, self.num_tentacles + 1)
        return 2 * np.pi * m / self.num_tentacles


@dataclass(frozen=True)
class DeformationState:
    """Per-tentacle amplitudes (m) and spatial frequencies (1/m)."""

    amplitudes: np.ndarray
    spatial_freqs: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=float).ravel()
        freq = np.array(self.spatial_freqs, dtype=float).ravel()
        if amp.shape != freq.shape:
            raise ValueError("amplitudes and spatial_freqs must have the same length")
        amp.flags.writeable = False
        freq.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "spatial_freqs", freq)

    @classmethod
    def zero(cls, consts):
        return cls(np.zeros(consts.num_tentacles), np.zeros(consts.num_tentacles))

    @classmethod
    def midpoint(cls, consts):
        m = consts.num_tentacles
        return cls(
            np.full(m, consts.amplitude_bound / 2), np.full(m, consts.spatial_freq_bound / 2)
        )

    @classmethod
    def from_vector(cls, zbar):
        """Build from the stacked ``[A_1..A_M, v_1..v_M]`` vector."""
        zbar = np.asarray(zbar, dtype=float)
        m = zbar.size // 2
        return cls(zbar[:m], zbar[m:])

    def as_vector(self):
        return np.concatenate([self.amplitudes, self.spatial_freqs])

    @property
    def num_tentacles(self):
        return self.amplitudes.size

    def violations(self, consts):
        """List human-readable constraint violations (empty when feasible)."""
        out = []
        if self.num_tentacles != consts.num_tentacles:
            out.append(f"expected {consts.num_tentacles} tentacles, got {self.num_tentacles}")
            return out
        eps = _BOUNDARY_SLACK
        for m, (a, v) in enumerate(zip(self.amplitudes, self.spatial_freqs)):
            if not (-eps <= a <= consts.amplitude_bound + eps):
                out.append(f"tentacle {m}: amplitude {a} outside [0, {consts.amplitude_bound}]")
            if not (-eps <= v <= consts.spatial_freq_bound + eps):
                out.append(f"tentacle {m}: frequency {v} outside [0, {consts.spatial_freq_bound}]")
            if abs(a * v) > 1 + eps:
                out.append(f"tentacle {m}: |A v| = {abs(a * v)} exceeds 1")
        return out

    def check_feasible(self, consts):
        problems = self.violations(consts)
        if problems:
            raise InfeasibleStateError("; ".join(problems))


@dataclass(frozen=True)
class ArrayLayout:
    """Element coordinates, row ``m*N + n`` for tentacle m, element n (0-based)."""

    positions: np.ndarray
    arc_positions: np.ndarray = field(default=None)

    @property
    def num_elements(self):
        return self.positions.shape[0]

    def csv_rows(self, elements_per_tentacle):
        """Yield ``(m, n, x, y, z)`` with 1-based tentacle/element indices."""
        for idx, (x, y, z) in enumerate(self.positions):
            m, n = divmod(idx, elements_per_tentacle)
            yield m + 1, n + 1, x, y, z


def _check_slope(amplitude, spatial_freq):
    slope = np.abs(np.asarray(amplitude) * np.asarray(spatial_freq))
    if np.any(slope > 1 + _BOUNDARY_SLACK):
        raise DomainError(
            f"|A v| = {np.max(slope)} > 1: the footprint integrand is not real"
        )


def projected_length(amplitude, spatial_freq, arc_position, tol=DEFAULT_TOL, phase=0.0):
    """Planar footprint length ``u(l)`` of one tentacle.

    Parameters
    ----------
    amplitude, spatial_freq : float
        Deformation amplitude ``A`` and spatial frequency ``v``.
    arc_position : float
        Arc length ``l >= 0`` at which to evaluate the footprint.
    tol : float
        Absolute quadrature error bound.
    phase : float
        Oscillation phase, included inside the integrand's cosine.

    Raises
    ------
    DomainError
        If ``|A v| > 1`` or ``l < 0``.
    """
    if arc_position < 0:
        raise DomainError(f"arc position must be non-negative, got {arc_position}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_slope(amplitude, spatial_freq)
    out = _kernels.projected_lengths([amplitude], [spatial_freq], [arc_position], phase, tol)
    return float(out[0, 0])


def footprints(state, consts, tol=DEFAULT_TOL):
    """``u_m(l_n)`` for all tentacles, shape ``(M, N)``."""
    _check_slope(state.amplitudes, state.spatial_freqs)
    return _kernels.projected_lengths(
        state.amplitudes, state.spatial_freqs, consts.arc_positions, consts.phase, tol
    )


def element_heights(state, consts):
    """``z_{m,n} = A_m sin(phase + v_m l_n)``, shape ``(M, N)``."""
    arg = consts.phase + np.outer(state.spatial_freqs, consts.arc_positions)
    return state.amplitudes[:, None] * np.sin(arg)


def footprint_derivatives(state, consts, step=(1e-6, 1e-5), tol=1e-13):
    """Finite-difference ``du/dA`` and ``du/dv``, each of shape ``(M, N)``.

    Differences are central except where the forward point would leave
    ``|A v| <= 1``; there the forward step is cut back to the boundary (or
    to zero, which gives a backward difference).  The derivative grows
    without bound at ``|A v| = 1``, so values there are only indicative.
    """
    a, v = state.amplitudes, state.spatial_freqs
    h_a, h_v = step
    with np.errstate(divide="ignore"):
        room_a = np.where(v > 0, 1.0 / v - a, np.inf)
        room_v = np.where(a > 0, 1.0 / a - v, np.inf)
    up_a = np.clip(room_a, 0.0, h_a)
    up_v = np.clip(room_v, 0.0, h_v)
    amps = np.concatenate([a + up_a, a - h_a, a, a])
    freqs = np.concatenate([v, v, v + up_v, v - h_v])
    u = _kernels.projected_lengths(amps, freqs, consts.arc_positions, consts.phase, tol)
    u = u.reshape(4, a.size, -1)
    du_da = (u[0] - u[1]) / (up_a + h_a)[:, None]
    du_dv = (u[2] - u[3]) / (up_v + h_v)[:, None]
    return du_da, du_dv


def element_positions(state, consts, tol=DEFAULT_TOL):
    """Element coordinates of a deformed array.

    Raises
    ------
    InfeasibleStateError
        If ``state`` violates the amplitude, frequency or ``|A v| <= 1``
        bounds of ``consts``.
    """
    state.check_feasible(consts)
    u = footprints(state, consts, tol)
    theta = consts.azimuths[:, None]
    pos = np.empty((consts.num_tentacles, consts.elements_per_tentacle, 3))
    pos[..., 0] = u * np.cos(theta)
    pos[..., 1] = u * np.sin(theta)
    pos[..., 2] = element_heights(state, consts)
    return ArrayLayout(pos.reshape(-1, 3), consts.arc_positions)


def verify_arc_length(state, m, consts, samples=10_000, tol=1e-12):
    """Length of the deformed tentacle ``m`` (0-based), measured numerically.

    The curve ``(u_m(l), z_m(l))`` is sampled at ``samples`` uniform arc
    positions and its polyline length is summed; the result should equal
    ``L_max``.
    """
    if samples < 10:
        raise ValueError("samples must be at least 10")
    a = state.amplitudes[m]
    v = state.spatial_freqs[m]
    _check_slope(a, v)
    ell = np.linspace(0.0, consts.total_arc_length, samples + 1)
    u = _kernels.projected_lengths([a], [v], ell[1:], consts.phase, tol)[0]
    u = np.concatenate([[0.0], u])
    z = a * np.sin(consts.phase + v * ell)
    return float(np.sum(np.hypot(np.diff(u), np.diff(z))))
