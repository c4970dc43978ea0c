"""Zero-forcing precoding, SINR and sum rate."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import ChannelMatrix, assemble_channel, path_terms
from .exceptions import DimensionMismatchError, RankDeficientChannelError
from .geometry import element_positions

DEFAULT_MAX_CONDITION = 1e12


@dataclass(frozen=True)
class PrecodeResult:
    """Normalised precoder ``W = alpha F`` with ``Tr(W^H W) = p_max``."""

    W: np.ndarray
    alpha: float
    p_max: float


@dataclass(frozen=True)
class RateReport:
    sinr: np.ndarray
    rates: np.ndarray
    sum_rate: float


def _matrix(H):
    return H.H if isinstance(H, ChannelMatrix) else np.asarray(H)


def zf_precoder(H, p_max, max_condition=DEFAULT_MAX_CONDITION):
    """Zero-forcing precoder from the right pseudoinverse of ``H``.

    ``F = H^H (H H^H)^{-1}`` is obtained from a Cholesky factorisation of the
    K x K Gram matrix, then scaled so the total transmit power is ``p_max``.

    Raises
    ------
    RankDeficientChannelError
        If there are more users than elements, or the Gram matrix has a
        condition number above ``max_condition``.
    """
    H = _matrix(H)
    k, n = H.shape
    if k > n:
        raise RankDeficientChannelError(f"{k} users cannot be zero-forced with {n} elements")
    gram = H @ H.conj().T
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > max_condition:
        raise RankDeficientChannelError(f"user Gram matrix condition number {cond:.3g}")
    try:
        factor = cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientChannelError(str(exc)) from exc
    # F^H = (H H^H)^{-1} H, Hermitian Gram.
    F = cho_solve(factor, H).conj().T
    power = np.real(np.vdot(F, F))
    alpha = float(np.sqrt(p_max / power))
    return PrecodeResult(alpha * F, alpha, float(p_max))


def sinr(H, W, noise_var):
    """Per-user SINR and rates for an arbitrary linear precoder.

    Interference is summed explicitly, so non-ZF precoders are handled too.
    ``W`` may be a :class:`PrecodeResult` or a plain ``(MN, K)`` array.
    """
    H = _matrix(H)
    W = W.W if isinstance(W, PrecodeResult) else np.asarray(W)
    if H.shape[1] != W.shape[0] or H.shape[0] != W.shape[1]:
        raise DimensionMismatchError(f"H is {H.shape} but W is {W.shape}")
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    S = np.abs(H @ W) ** 2
    signal = np.diag(S)
    interference = S.sum(axis=1) - signal
    gamma = signal / (interference + noise_var)
    rates = np.log2(1.0 + gamma)
    return RateReport(gamma, rates, float(rates.sum()))


@dataclass(frozen=True)
class Evaluation:
    """Everything computed on the way from a layout to its sum rate."""

    positions: np.ndarray
    terms: np.ndarray
    channel: ChannelMatrix
    precoder: PrecodeResult
    report: RateReport

    @property
    def sum_rate(self):
        return self.report.sum_rate


def evaluate_positions(positions, paths, config, p_max, noise_var, precoder=None):
    """Rate of an explicit element layout.

    With ``precoder=None`` the ZF precoder is recomputed for the layout;
    otherwise the given one is held fixed.
    """
    positions = np.asarray(getattr(positions, "positions", positions), dtype=float)
    terms = path_terms(positions, paths, config)
    channel = ChannelMatrix(np.conj(terms.sum(axis=1)))
    if precoder is None:
        precoder = zf_precoder(channel, p_max)
    report = sinr(channel, precoder, noise_var)
    return Evaluation(positions, terms, channel, precoder, report)


def evaluate_state(state, paths, consts, config, p_max, noise_var, precoder=None):
    layout = element_positions(state, consts)
    return evaluate_positions(layout.positions, paths, config, p_max, noise_var, precoder)


def sum_rate(state, paths, consts, config, p_max, noise_var):
    """Sum rate of a deformation state: geometry, channel, ZF, SINR."""
    layout = element_positions(state, consts)
    channel = assemble_channel(layout, paths, config)
    return sinr(channel, zf_precoder(channel, p_max), noise_var)
