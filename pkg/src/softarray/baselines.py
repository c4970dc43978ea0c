"""Comparison arrays: fixed CCAA and per-element reconfigurable CCAAs.

The reconfigurable arrays keep every element on its tentacle's ray.  In the
2D variant each element slides radially within ``[0, L_max]``; consecutive
elements stay at least ``lambda / 2`` apart.  The 3D variant additionally
gives every element its own height in ``[-h, h]`` (``h = A_max`` unless
overridden).  Both are optimised by projected gradient ascent with a
backtracking acceptance test on the true sum rate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression

from .geometry import DeformationState
from .gradient import channel_chain_rule, grad_sum_rate_wrt_z, radial_channel_derivative
from .precoding import evaluate_positions, sum_rate


@dataclass(frozen=True)
class BaselineSettings:
    """Projected-gradient settings; step lengths in metres (``None`` = default).

    Defaults: radial step ``lambda / 8``, height step ``A_max / 4``.
    """

    max_iterations: int = 20
    tolerance: float = 1e-4
    radial_step: float = None
    height_step: float = None
    shrink: float = 0.5
    min_step: float = 1e-7

    def steps(self, consts):
        r = self.radial_step if self.radial_step is not None else consts.wavelength / 8
        h = self.height_step if self.height_step is not None else consts.amplitude_bound / 4
        return float(r), float(h)


@dataclass(frozen=True)
class ElementOffsets2D:
    """Radial element positions, shape ``(M, N)``; all heights are zero."""

    radii: np.ndarray

    def positions(self, consts):
        theta = consts.azimuths[:, None]
        pos = np.zeros(self.radii.shape + (3,))
        pos[..., 0] = self.radii * np.cos(theta)
        pos[..., 1] = self.radii * np.sin(theta)
        return pos.reshape(-1, 3)


@dataclass(frozen=True)
class ElementOffsets3D:
    radii: np.ndarray
    heights: np.ndarray

    def positions(self, consts):
        pos = ElementOffsets2D(self.radii).positions(consts)
        pos[:, 2] = np.ravel(self.heights)
        return pos


@dataclass(frozen=True)
class BaselineResult:
    offsets: object
    report: object
    rates: np.ndarray  # accepted true sum rates, starting point first


def nominal_radii(consts):
    return np.tile(consts.arc_positions, (consts.num_tentacles, 1))


def min_spacing(consts):
    return consts.wavelength / 2


def project_radii(radii, consts, spacing=None):
    """Euclidean projection onto ``0 <= r_1``, ``r_{n+1} - r_n >= d``, ``r_N <= L_max``.

    Shifting ``q_n = r_n - (n-1) d`` turns the spacing rule into plain
    monotonicity, so the projection is an isotonic fit clipped to the box.
    """
    d = min_spacing(consts) if spacing is None else spacing
    radii = np.atleast_2d(np.asarray(radii, dtype=float))
    n = radii.shape[1]
    top = consts.total_arc_length - (n - 1) * d
    if top < -1e-12:
        raise ValueError(f"{n} elements at spacing {d} do not fit in {consts.total_arc_length}")
    offset = d * np.arange(n)
    out = np.empty_like(radii)
    for m, row in enumerate(radii - offset):
        out[m] = np.clip(isotonic_regression(row).x, 0.0, max(top, 0.0))
    return out + offset


def fixed_ccaa_rate(paths, consts, config, p_max, noise_var):
    """Sum rate of the undeformed array."""
    return sum_rate(DeformationState.zero(consts), paths, consts, config, p_max, noise_var)


def _ascend(paths, consts, config, p_max, noise_var, settings, radii, heights, height_bound):
    step_r, step_h = settings.steps(consts)
    free_h = height_bound > 0

    def positions(r, h):
        return ElementOffsets3D(r, h).positions(consts)

    ev = evaluate_positions(positions(radii, heights), paths, config, p_max, noise_var)
    rate = ev.sum_rate
    rates = [rate]
    for _ in range(settings.max_iterations):
        g_r = channel_chain_rule(ev.channel, ev.precoder, noise_var,
                                 radial_channel_derivative(ev.terms, paths, consts,
                                                           config.wavelength))
        g_r = g_r.reshape(radii.shape)
        dir_r = g_r / np.max(np.abs(g_r)) if np.any(g_r) else g_r
        if free_h:
            g_h = grad_sum_rate_wrt_z(ev.channel, ev.precoder, noise_var, ev.terms,
                                      paths.elevations, config.wavelength).reshape(radii.shape)
            dir_h = g_h / np.max(np.abs(g_h)) if np.any(g_h) else g_h
        else:
            dir_h = np.zeros_like(heights)
        t = 1.0
        accepted = False
        while t * max(step_r, step_h if free_h else 0.0) >= settings.min_step:
            cand_r = project_radii(radii + t * step_r * dir_r, consts)
            cand_h = np.clip(heights + t * step_h * dir_h, -height_bound, height_bound)
            if np.array_equal(cand_r, radii) and np.array_equal(cand_h, heights):
                break
            cand_ev = evaluate_positions(positions(cand_r, cand_h), paths, config, p_max,
                                         noise_var)
            if cand_ev.sum_rate > rate:
                accepted = True
                break
            t *= settings.shrink
        if not accepted:
            break
        gain = cand_ev.sum_rate - rate
        radii, heights, ev, rate = cand_r, cand_h, cand_ev, cand_ev.sum_rate
        rates.append(rate)
        if gain < settings.tolerance:
            break
    return radii, heights, ev, np.array(rates)


def optimize_2d_ccaa(paths, consts, config, p_max, noise_var, settings=BaselineSettings(),
                     init=None):
    """Radial per-element repositioning from the nominal (or given) layout."""
    radii = nominal_radii(consts) if init is None else project_radii(init.radii, consts)
    heights = np.zeros_like(radii)
    radii, _, ev, rates = _ascend(paths, consts, config, p_max, noise_var, settings,
                                  radii, heights, 0.0)
    return BaselineResult(ElementOffsets2D(radii), ev.report, rates)


def optimize_3d_ccaa(paths, consts, config, p_max, noise_var, settings=BaselineSettings(),
                     init=None, height_bound=None):
    """Radial and vertical per-element repositioning.

    ``init`` may be an :class:`ElementOffsets2D` (e.g. the 2D optimum, for a
    warm start) or :class:`ElementOffsets3D`; default is the nominal layout.
    """
    hb = consts.amplitude_bound if height_bound is None else float(height_bound)
    if init is None:
        radii = nominal_radii(consts)
        heights = np.zeros_like(radii)
    else:
        radii = project_radii(init.radii, consts)
        heights = np.clip(np.array(getattr(init, "heights", np.zeros_like(radii)), dtype=float)
                          .reshape(radii.shape), -hb, hb)
    radii, heights, ev, rates = _ascend(paths, consts, config, p_max, noise_var, settings,
                                        radii, heights, hb)
    return BaselineResult(ElementOffsets3D(radii, heights), ev.report, rates)
