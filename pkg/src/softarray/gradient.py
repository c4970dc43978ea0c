"""Analytic sum-rate gradient with respect to element heights and deformation.

The precoder ``W`` and the planar element coordinates are held fixed; only
the ``exp(-j 2pi/lambda z cos(theta))`` factor of each path term moves with
``z``.  The result is lifted to the 2M deformation parameters through the
block-diagonal Jacobian of ``z_{m,n} = A_m sin(phase + v_m l_n)``.

:func:`footprint_gradient` supplies the part this leaves out: deforming a
tentacle also pulls its elements towards the hub.  Adding it gives the full
frozen-precoder gradient.
"""

from dataclasses import dataclass

import numpy as np

from .channel import direction_vectors
from .geometry import element_positions, footprint_derivatives
from .precoding import PrecodeResult, evaluate_positions


@dataclass(frozen=True)
class GradientReport:
    """``g_bar`` is dR/dz per element; ``grad_zbar`` is ``[dR/dA, dR/dv]``."""

    g_bar: np.ndarray
    grad_zbar: np.ndarray
    elevations: np.ndarray


def rate_sensitivities(G, noise_var):
    """Chain factors ``d R / d S_ki`` from the gain matrix ``G = H W``.

    ``S_ki = |h_k^H w_i|^2``.  Returns a ``(K, K)`` real array.
    """
    S = np.abs(G) ** 2
    signal = np.diag(S)
    denom = S.sum(axis=1) - signal + noise_var
    gamma = signal / denom
    dgamma = -(signal / denom**2)[:, None] * np.ones_like(S)
    np.fill_diagonal(dgamma, 1.0 / denom)
    return dgamma / (np.log(2.0) * (1.0 + gamma))[:, None]


def grad_sum_rate_wrt_z(H, W, noise_var, terms, elevations, wavelength):
    """``dR/dz_{m,n}`` for every element, precoder and x/y held fixed.

    Parameters
    ----------
    H : ndarray, shape (K, MN)
        Channel with rows ``h_k^H``.
    W : ndarray or PrecodeResult, shape (MN, K)
    noise_var : float
    terms : ndarray, shape (K, P, MN)
        Per-path contributions whose sum over P is ``h_k``.
    elevations : ndarray, shape (K, P)
        Arrival elevation of each path.
    wavelength : float

    Returns
    -------
    ndarray, shape (MN,)
    """
    # dh_k/dz_j: each path term picks up its own -j k0 cos(theta).
    k0 = 2 * np.pi / wavelength
    dh = np.einsum("kp,kpj->kj", -1j * k0 * np.cos(elevations), terms)
    return channel_chain_rule(H, W, noise_var, dh)


def channel_chain_rule(H, W, noise_var, dh):
    """Push per-entry channel derivatives through SINR to the sum rate.

    ``dh[k, j]`` is the derivative of entry j of ``h_k`` (not conjugated)
    with respect to a scalar coordinate of element j; ``W`` is constant.
    """
    H = getattr(H, "H", H)
    W = W.W if isinstance(W, PrecodeResult) else np.asarray(W)
    G = H @ W
    D = rate_sensitivities(G, noise_var)
    # dS_ki/dx_j = 2 Re{ G_ki conj(W_ji) dh_kj }
    weights = np.conj(W) @ (D * G).T
    return 2.0 * np.real(np.sum(dh * weights.T, axis=0))


def jacobian_blocks(state, consts):
    """Per-tentacle Jacobians ``J_m``, shape ``(M, N, 2)``."""
    ell = consts.arc_positions
    arg = consts.phase + np.outer(state.spatial_freqs, ell)
    blocks = np.empty((state.num_tentacles, ell.size, 2))
    blocks[..., 0] = np.sin(arg)
    blocks[..., 1] = state.amplitudes[:, None] * ell[None, :] * np.cos(arg)
    return blocks


def jacobian(state, consts):
    """Dense ``(MN, 2M)`` Jacobian of element heights w.r.t. ``[A, v]``."""
    blocks = jacobian_blocks(state, consts)
    m, n = blocks.shape[:2]
    J = np.zeros((m * n, 2 * m))
    for i in range(m):
        J[i * n:(i + 1) * n, i] = blocks[i, :, 0]
        J[i * n:(i + 1) * n, m + i] = blocks[i, :, 1]
    return J


def lift_gradient(g_bar, state, consts):
    """``J^T g_bar`` without forming ``J``."""
    blocks = jacobian_blocks(state, consts)
    g = np.asarray(g_bar).reshape(blocks.shape[:2])
    return np.concatenate([
        np.einsum("mn,mn->m", blocks[..., 0], g),
        np.einsum("mn,mn->m", blocks[..., 1], g),
    ])


def radial_channel_derivative(terms, paths, consts, wavelength):
    """``dh_k/dr_j``: derivative of each channel entry along its tentacle's ray."""
    m, n = consts.num_tentacles, consts.elements_per_tentacle
    theta = np.repeat(consts.azimuths, n)
    radial = np.stack([np.cos(theta), np.sin(theta), np.zeros(m * n)], axis=1)
    proj = direction_vectors(paths) @ radial.T
    k0 = 2 * np.pi / wavelength
    return np.sum(-1j * k0 * proj * terms, axis=1)


def footprint_gradient(evaluation, state, consts, paths, config, noise_var):
    """Contribution of the footprint contraction to ``[dR/dA, dR/dv]``.

    Elements sit at radius ``u_m(l_n; A_m, v_m)`` on their ray, so the
    radial sensitivity ``dR/du`` is pulled back through finite-difference
    footprint derivatives.  ``W`` is frozen as in the height gradient.
    """
    dh = radial_channel_derivative(evaluation.terms, paths, consts, config.wavelength)
    g_u = channel_chain_rule(evaluation.channel, evaluation.precoder, noise_var, dh)
    g_u = g_u.reshape(consts.num_tentacles, consts.elements_per_tentacle)
    du_da, du_dv = footprint_derivatives(state, consts)
    return np.concatenate([np.sum(g_u * du_da, axis=1), np.sum(g_u * du_dv, axis=1)])


def gradient_from_evaluation(evaluation, state, consts, paths, config, noise_var,
                             planar=False):
    """Gradient at an already evaluated state.

    With ``planar=True`` the footprint term is added to ``grad_zbar`` so it
    becomes the full derivative of the frozen-precoder rate; ``g_bar`` is
    always the height-only part.
    """
    g_bar = grad_sum_rate_wrt_z(
        evaluation.channel, evaluation.precoder, noise_var, evaluation.terms,
        paths.elevations, config.wavelength,
    )
    grad = lift_gradient(g_bar, state, consts)
    if planar:
        grad = grad + footprint_gradient(evaluation, state, consts, paths, config, noise_var)
    return GradientReport(g_bar, grad, paths.elevations)


def grad_sum_rate_wrt_params(state, paths, consts, config, p_max, noise_var, planar=False):
    """Gradient of the sum rate w.r.t. ``[A_1..A_M, v_1..v_M]``.

    The ZF precoder is computed once at ``state`` and then treated as a
    constant.  By default so are the planar element coordinates; pass
    ``planar=True`` to include their dependence on the deformation.
    """
    layout = element_positions(state, consts)
    ev = evaluate_positions(layout.positions, paths, config, p_max, noise_var)
    return gradient_from_evaluation(ev, state, consts, paths, config, noise_var, planar)


def frozen_rate(heights, positions, paths, config, precoder, noise_var):
    """Sum rate after replacing element heights, with x, y and ``W`` frozen.

    This is the function whose derivative the analytic gradient computes.
    """
    pos = np.array(positions, dtype=float)
    pos[:, 2] = heights
    return evaluate_positions(pos, paths, config, precoder.p_max, noise_var, precoder).sum_rate
