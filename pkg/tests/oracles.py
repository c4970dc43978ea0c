"""Independent reference implementations used only by the tests.

None of these import the code paths they check: quadrature, channel sums,
SINR and ZF are rebuilt from scratch with plain loops or different
numerical methods.
"""

import math
import cmath

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=60):
    """Classic recursive adaptive Simpson with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth + 1))

    if b == a:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def footprint_simpson(amp, freq, ell, phase=0.0, tol=1e-12):
    c = amp * freq

    def f(s):
        t = c * math.cos(freq * s + phase)
        return math.sqrt(max(0.0, 1.0 - t * t))

    # Split at the kinks of |sin| so Simpson sees smooth pieces.
    cuts = [0.0]
    if abs(abs(c) - 1.0) < 1e-12 and freq > 0:
        k = math.ceil(-phase / math.pi)
        while True:
            s = (k * math.pi - phase) / freq
            if s >= ell:
                break
            if s > 0:
                cuts.append(s)
            k += 1
    cuts.append(ell)
    share = tol / max(len(cuts) - 1, 1)
    return sum(adaptive_simpson(f, lo, hi, share) for lo, hi in zip(cuts[:-1], cuts[1:]))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def footprint_gauss_legendre(amp, freq, ell_points, phase=0.0):
    """Segment-wise 64-point Gauss-Legendre; fine when the integrand is smooth."""
    c = amp * freq
    out, acc, left = [], 0.0, 0.0
    for right in ell_points:
        s = 0.5 * (right - left) * _GL_X + 0.5 * (right + left)
        vals = np.sqrt(np.clip(1 - (c * np.cos(freq * s + phase)) ** 2, 0, None))
        acc += 0.5 * (right - left) * float(vals @ _GL_W)
        out.append(acc)
        left = right
    return out


def channel_loops(positions, gains, elevations, azimuths, wavelength, directivity):
    """h_k (not conjugated) by explicit loops over users, elements and paths."""
    K, P = len(gains), len(gains[0])
    MN = len(positions)
    scale = math.sqrt(MN / P)
    h = np.zeros((K, MN), dtype=complex)
    for k in range(K):
        for j in range(MN):
            x, y, z = positions[j]
            acc = 0j
            for p in range(P):
                th, ph = elevations[k][p], azimuths[k][p]
                if directivity is None:
                    q = 1.0
                elif 0 <= th <= math.pi / 2:
                    q = 2 * (directivity + 1) * max(math.cos(th), 0.0) ** directivity
                else:
                    q = 0.0
                arg = x * math.sin(th) * math.cos(ph) + y * math.sin(th) * math.sin(ph) \
                    + z * math.cos(th)
                acc += gains[k][p] * math.sqrt(q) * cmath.exp(-2j * math.pi / wavelength * arg)
            h[k, j] = scale * acc
    return h


def sinr_loops(h, W, noise_var):
    """SINR from h_k (rows, not conjugated) and W with scalar loops."""
    K = len(h)
    out = []
    for k in range(K):
        s = []
        for i in range(K):
            acc = 0j
            for j in range(len(h[k])):
                acc += h[k][j].conjugate() * W[j][i]
            s.append(abs(acc) ** 2)
        interf = sum(s[i] for i in range(K) if i != k)
        out.append(s[k] / (interf + noise_var))
    return np.array(out)


def pipeline_rate(amplitudes, freqs, consts, gains, elevations, azimuths, wavelength,
                  directivity, p_max, noise_var):
    """Sum rate rebuilt from scratch: GL footprints, loop channel, pinv ZF."""
    M, N = consts.num_tentacles, consts.elements_per_tentacle
    ell = [(n + 1) / N * consts.total_arc_length for n in range(N)]
    pos = []
    for m in range(M):
        theta = 2 * math.pi * (m + 1) / M
        u = footprint_gauss_legendre(amplitudes[m], freqs[m], ell, consts.phase)
        for n in range(N):
            pos.append((u[n] * math.cos(theta), u[n] * math.sin(theta),
                        amplitudes[m] * math.sin(consts.phase + freqs[m] * ell[n])))
    h = channel_loops(pos, gains, elevations, azimuths, wavelength, directivity)
    Hh = h.conj()  # rows h_k^H
    F = np.linalg.pinv(Hh)
    W = math.sqrt(p_max / np.trace(F.conj().T @ F).real) * F
    G = np.abs(Hh @ W) ** 2
    sig = np.diag(G)
    gamma = sig / (G.sum(axis=1) - sig + noise_var)
    return float(np.sum(np.log2(1 + gamma)))


def single_user_rate_grid(amps, freqs, consts, gains, elevations, azimuths, wavelength,
                          directivity, p_max, noise_var):
    """Single-tentacle, single-user sum rate on a full (A, v) grid.

    With one user ZF is the matched filter, so the rate is
    log2(1 + p_max ||h||^2 / noise_var).  Footprints use 64-point
    Gauss-Legendre per element segment; everything is broadcast over the grid.
    """
    assert consts.num_tentacles == 1 and len(gains) == 1
    N = consts.elements_per_tentacle
    ell = np.array([(n + 1) / N * consts.total_arc_length for n in range(N)])
    A, V = np.meshgrid(np.asarray(amps, float), np.asarray(freqs, float), indexing="ij")
    A, V = A[..., None], V[..., None]
    u = np.zeros(A.shape[:2] + (N,))
    acc, left = 0.0, 0.0
    for n, right in enumerate(ell):
        s = 0.5 * (right - left) * _GL_X + 0.5 * (right + left)
        vals = np.sqrt(np.clip(1 - (A * V * np.cos(V * s + consts.phase)) ** 2, 0, None))
        acc = acc + 0.5 * (right - left) * (vals @ _GL_W)
        u[..., n] = acc
        left = right
    theta = 2 * math.pi / 1  # m = M = 1
    x, y = u * math.cos(theta), u * math.sin(theta)
    z = A * np.sin(consts.phase + V * ell)
    g = np.asarray(gains[0])
    th, ph = np.asarray(elevations[0]), np.asarray(azimuths[0])
    if directivity is None:
        q = np.ones_like(th)
    else:
        q = 2 * (directivity + 1) * np.clip(np.cos(th), 0, None) ** directivity
    scale = math.sqrt(N / len(g))
    h = np.zeros(A.shape[:2] + (N,), dtype=complex)
    for p in range(len(g)):
        arg = x * math.sin(th[p]) * math.cos(ph[p]) + y * math.sin(th[p]) * math.sin(ph[p]) \
            + z * math.cos(th[p])
        h += g[p] * math.sqrt(q[p]) * np.exp(-2j * math.pi / wavelength * arg)
    power = scale**2 * np.sum(np.abs(h) ** 2, axis=-1)
    return np.log2(1 + p_max * power / noise_var)


def footprint_partials_simpson(amp, freq, ell, phase=0.0, tol=1e-12):
    """``du/dA`` and ``du/dv`` by differentiating under the integral sign."""

    def common(s):
        cos = math.cos(freq * s + phase)
        c = amp * freq * cos
        return cos, c, math.sqrt(1.0 - c * c)

    def d_amp(s):
        cos, c, root = common(s)
        return -c * freq * cos / root

    def d_freq(s):
        cos, c, root = common(s)
        dc = amp * cos - amp * freq * s * math.sin(freq * s + phase)
        return -c * dc / root

    return adaptive_simpson(d_amp, 0.0, ell, tol), adaptive_simpson(d_freq, 0.0, ell, tol)


def in_polygon(a, v, cur_a, cur_v, consts, trust, slack=1e-12):
    """Membership in the linearised feasible polygon, written out longhand."""
    lin = a * cur_v + cur_a * v - cur_a * cur_v
    return ((a >= -slack) & (a <= consts.amplitude_bound + slack)
            & (v >= -slack) & (v <= consts.spatial_freq_bound + slack)
            & (np.abs(lin) <= 1 + slack)
            & (np.abs(a - cur_a) <= trust[0] + slack) & (np.abs(v - cur_v) <= trust[1] + slack))


def grid_best_lp(g, cur, consts, trust, n=400):
    """Best linear value on an n x n grid over the polygon, its location and cell size."""
    a0 = max(0.0, cur[0] - trust[0])
    a1 = min(consts.amplitude_bound, cur[0] + trust[0])
    v0 = max(0.0, cur[1] - trust[1])
    v1 = min(consts.spatial_freq_bound, cur[1] + trust[1])
    A, V = np.meshgrid(np.linspace(a0, a1, n), np.linspace(v0, v1, n), indexing="ij")
    ok = in_polygon(A, V, cur[0], cur[1], consts, trust)
    val = np.where(ok, g[0] * A + g[1] * V, -np.inf)
    i = np.unravel_index(np.argmax(val), val.shape)
    return val[i], (A[i], V[i]), ((a1 - a0) / (n - 1), (v1 - v0) / (n - 1))
