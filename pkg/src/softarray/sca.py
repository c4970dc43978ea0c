"""Successive convex approximation of the deformation problem.

Each outer iteration linearises the sum rate around the current deformation
and maximises the linear model over a per-tentacle polygon: the amplitude
and frequency boxes, the linearised ``|A v| <= 1`` constraint and a box
trust region.  The polygon LP is two-dimensional, so it is solved exactly by
enumerating the vertices.  A candidate is accepted only if the true sum rate
(new geometry, new ZF precoder) improves; otherwise the trust region shrinks
and the LP is re-solved.
"""

import warnings
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
from scipy.stats import qmc

from .geometry import DeformationState
from .gradient import gradient_from_evaluation
from .precoding import evaluate_state

INIT_MODES = ("midpoint", "random", "provided")
GRADIENT_MODES = ("full", "heights")

_PAIRS = np.array(list(combinations(range(6), 2)))

# A full-trust step predicted to gain less than this (relative to the rate)
# counts as stationary; exact zeros never occur with cos(pi/2) ~ 6e-17.
STATIONARY_RTOL = 1e-12


@dataclass(frozen=True)
class ScaSettings:
    """Iteration budget, trust region and initialisation of :func:`run_sca`.

    ``trust_amplitude``/``trust_freq`` default to a quarter of the
    amplitude/frequency bounds.  ``freeze_precoder`` keeps the initial ZF
    precoder for the whole run (ablation only).  ``gradient="heights"``
    drops the footprint term and linearises with the height-only gradient;
    the true rate used for acceptance is the same either way.
    """

    max_iterations: int = 20
    tolerance: float = 1e-4
    trust_amplitude: float = None
    trust_freq: float = None
    shrink: float = 0.5
    min_trust: float = 1e-6
    init: str = "midpoint"
    initial_state: DeformationState = None
    init_seed: int = 0
    freeze_precoder: bool = False
    gradient: str = "full"

    def __post_init__(self):
        if self.gradient not in GRADIENT_MODES:
            raise ValueError(f"gradient must be one of {GRADIENT_MODES}, got {self.gradient!r}")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if self.init == "provided" and self.initial_state is None:
            raise ValueError("init='provided' needs initial_state")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.max_iterations < 1 or self.tolerance < 0 or self.min_trust <= 0:
            raise ValueError("invalid iteration budget or tolerances")

    def trust_radii(self, consts):
        da = self.trust_amplitude if self.trust_amplitude is not None else consts.amplitude_bound / 4
        dv = self.trust_freq if self.trust_freq is not None else consts.spatial_freq_bound / 4
        return float(da), float(dv)


@dataclass(frozen=True)
class ScaStep:
    iteration: int
    state: DeformationState
    rate: float
    predicted: float
    grad_norm: float
    step_norm: float
    trust: tuple
    accepted: bool


@dataclass
class ScaTrace:
    steps: list = field(default_factory=list)
    zero_rate: float = float("nan")
    final_rate: float = float("nan")
    used_zero_state: bool = False
    stop_reason: str = ""

    @property
    def accepted_rates(self):
        return np.array([s.rate for s in self.steps if s.accepted])

    @property
    def iterations(self):
        return max((s.iteration for s in self.steps), default=0)


def linearized_objective(grad, candidate, current, rate):
    """First-order model ``R + <grad, candidate - current>``."""
    cand = candidate.as_vector() if isinstance(candidate, DeformationState) else candidate
    cur = current.as_vector() if isinstance(current, DeformationState) else current
    return float(rate + np.dot(grad, np.asarray(cand) - np.asarray(cur)))


def _halfplanes(amp, freq, consts, trust):
    """Constraint rows ``a0 A + a1 v <= b`` of every tentacle polygon, (M, 6, 3)."""
    da, dv = trust
    lo_a = np.maximum(0.0, amp - da)
    hi_a = np.minimum(consts.amplitude_bound, amp + da)
    lo_v = np.maximum(0.0, freq - dv)
    hi_v = np.minimum(consts.spatial_freq_bound, freq + dv)
    one, zero = np.ones_like(amp), np.zeros_like(amp)
    prod = amp * freq
    rows = [
        (-one, zero, -lo_a),
        (one, zero, hi_a),
        (zero, -one, -lo_v),
        (zero, one, hi_v),
        # linearised |A v| <= 1 around the current point
        (freq, amp, 1.0 + prod),
        (-freq, -amp, 1.0 - prod),
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=1)


def solve_tentacle_lps(grad, current, consts, trust):
    """Exact maximiser of the linear model over every tentacle polygon.

    Returns ``(amplitudes, spatial_freqs)`` before any projection onto the
    true ``|A v| <= 1`` constraint.  Among tied optima the vertex closest to
    the current point wins; a zero gradient returns the current point.
    """
    amp, freq = current.amplitudes, current.spatial_freqs
    m = amp.size
    g = np.asarray(grad, dtype=float)
    ga, gv = g[:m], g[m:]
    planes = _halfplanes(amp, freq, consts, trust)

    p, q = planes[:, _PAIRS[:, 0]], planes[:, _PAIRS[:, 1]]
    det = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    ok = np.abs(det) > 1e-14
    safe = np.where(ok, det, 1.0)
    va = (p[..., 2] * q[..., 1] - p[..., 1] * q[..., 2]) / safe
    vv = (p[..., 0] * q[..., 2] - p[..., 2] * q[..., 0]) / safe

    lhs = planes[:, None, :, 0] * va[..., None] + planes[:, None, :, 1] * vv[..., None]
    scale = 1e-10 * (1.0 + np.abs(planes[:, None, :, 2]))
    feasible = ok & np.all(lhs <= planes[:, None, :, 2] + scale, axis=-1)

    # The current point is always feasible, so it joins the candidate set.
    va = np.concatenate([va, amp[:, None]], axis=1)
    vv = np.concatenate([vv, freq[:, None]], axis=1)
    feasible = np.concatenate([feasible, np.ones((m, 1), dtype=bool)], axis=1)

    value = ga[:, None] * va + gv[:, None] * vv
    value = np.where(feasible, value, -np.inf)
    best = value.max(axis=1, keepdims=True)
    tie = 1e-12 * (np.abs(ga) * consts.amplitude_bound + np.abs(gv) * consts.spatial_freq_bound)
    near = value >= best - tie[:, None]
    # Distances measured in units of each box so A and v weigh equally.
    da = (va - amp[:, None]) / max(consts.amplitude_bound, 1e-300)
    dv = (vv - freq[:, None]) / max(consts.spatial_freq_bound, 1e-300)
    pick = np.argmin(np.where(near, np.hypot(da, dv), np.inf), axis=1)
    rows = np.arange(m)
    return va[rows, pick], vv[rows, pick]


def project_feasible(amplitudes, spatial_freqs, consts):
    """Clip to the boxes and scale ``v`` down wherever ``A v > 1``."""
    a = np.clip(amplitudes, 0.0, consts.amplitude_bound)
    v = np.clip(spatial_freqs, 0.0, consts.spatial_freq_bound)
    over = a * v > 1.0
    v = np.where(over, 1.0 / np.where(over, a, 1.0), v)
    return DeformationState(a, v)


def solve_subproblem(grad, current, consts, trust):
    """One linearised step: exact polygon LP per tentacle, then projection."""
    amp, freq = solve_tentacle_lps(grad, current, consts, trust)
    return project_feasible(amp, freq, consts)


def initial_state(consts, settings):
    if settings.init == "provided":
        state = settings.initial_state
        state.check_feasible(consts)
        return state
    if settings.init == "random":
        rng = np.random.default_rng(settings.init_seed)
        m = consts.num_tentacles
        return project_feasible(
            rng.uniform(0.0, consts.amplitude_bound, m),
            rng.uniform(0.0, consts.spatial_freq_bound, m),
            consts,
        )
    return DeformationState.midpoint(consts)


def run_sca(paths, consts, config, p_max, noise_var, settings=ScaSettings()):
    """Optimise the deformation of every tentacle for one channel realisation.

    Returns
    -------
    state : DeformationState
        Best state seen, or the undeformed array if that is better.
    trace : ScaTrace
        Every attempted step, accepted or not.

    Raises
    ------
    RankDeficientChannelError
        From the ZF precoder, at any evaluated state.
    """
    state = initial_state(consts, settings)
    ev = evaluate_state(state, paths, consts, config, p_max, noise_var)
    frozen = ev.precoder if settings.freeze_precoder else None
    trust0 = settings.trust_radii(consts)
    rate = ev.sum_rate
    trace = ScaTrace()
    trace.steps.append(ScaStep(0, state, rate, rate, float("nan"), 0.0, trust0, True))

    for it in range(1, settings.max_iterations + 1):
        grad = gradient_from_evaluation(ev, state, consts, paths, config, noise_var,
                                        planar=settings.gradient == "full").grad_zbar
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            trace.stop_reason = "stationary"
            break
        trust = trust0
        accepted = False
        while True:
            cand = solve_subproblem(grad, state, consts, trust)
            step = float(np.linalg.norm(cand.as_vector() - state.as_vector()))
            predicted = linearized_objective(grad, cand, state, rate)
            if trust == trust0 and predicted - rate <= STATIONARY_RTOL * max(1.0, abs(rate)):
                trace.stop_reason = "stationary"
                break
            if step == 0.0:
                trace.stop_reason = "no ascent step"
                break
            cand_ev = evaluate_state(cand, paths, consts, config, p_max, noise_var, frozen)
            accepted = cand_ev.sum_rate > rate
            trace.steps.append(
                ScaStep(it, cand, cand_ev.sum_rate, predicted, gnorm, step, trust, accepted)
            )
            if accepted:
                break
            trust = (trust[0] * settings.shrink, trust[1] * settings.shrink)
            if max(trust) < settings.min_trust:
                trace.stop_reason = "trust region collapsed"
                break
        if not accepted:
            break
        gain = cand_ev.sum_rate - rate
        state, ev, rate = cand, cand_ev, cand_ev.sum_rate
        if gain < settings.tolerance:
            trace.stop_reason = "converged"
            break
    else:
        trace.stop_reason = "max iterations"

    zero = DeformationState.zero(consts)
    trace.zero_rate = evaluate_state(zero, paths, consts, config, p_max, noise_var, frozen).sum_rate
    if trace.zero_rate > rate:
        state, rate = zero, trace.zero_rate
        trace.used_zero_state = True
    trace.final_rate = rate
    return state, trace


def multistart_states(consts, starts, seed=0):
    """Start points from a scrambled Sobol sequence over the deformation box.

    Sobol points are balanced: any power-of-two prefix puts the same number
    of points in every dyadic cell, so a handful of starts already covers
    the box far more evenly than independent draws.
    """
    m = consts.num_tentacles
    with warnings.catch_warnings():
        # the balance property is only exact for powers of two; fine otherwise
        warnings.simplefilter("ignore", UserWarning)
        unit = qmc.Sobol(2 * m, scramble=True, seed=seed).random(starts)
    amps = unit[:, :m] * consts.amplitude_bound
    freqs = unit[:, m:] * consts.spatial_freq_bound
    return [project_feasible(a, v, consts) for a, v in zip(amps, freqs)]


def run_sca_multistart(paths, consts, config, p_max, noise_var, settings=ScaSettings(),
                       starts=4, seed=0):
    """Best of ``starts`` runs from :func:`multistart_states`.

    Ties keep the earlier start.  The returned trace is the winner's.
    """
    best = None
    for state0 in multistart_states(consts, starts, seed):
        s = replace(settings, init="provided", initial_state=state0)
        state, trace = run_sca(paths, consts, config, p_max, noise_var, s)
        if best is None or trace.final_rate > best[1].final_rate:
            best = (state, trace)
    return best
