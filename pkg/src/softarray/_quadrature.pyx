# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Gauss-Kronrod kernel for tentacle footprint lengths.

Mirrors :mod:`softarray._quadrature_py` interval for interval; only the
summation order of the accepted pieces differs.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sqrt, fabs

cnp.import_array()

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]

XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

cdef int MAX_DEPTH = 50
cdef double ROUNDOFF = 1e-15


cdef inline double _integrand(double s, double slope, double freq, double phase) nogil:
    cdef double t = slope * cos(freq * s + phase)
    t = 1.0 - t * t
    if t <= 0.0:
        return 0.0
    return sqrt(t)


cdef double _gk15(double a, double b, double slope, double freq, double phase,
                  double* err) nogil:
    cdef double centre = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double fc = _integrand(centre, slope, freq, phase)
    cdef double kron = WGK[7] * fc
    cdef double gauss = WG[3] * fc
    cdef double dx, f1, f2
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        f1 = _integrand(centre - dx, slope, freq, phase)
        f2 = _integrand(centre + dx, slope, freq, phase)
        kron += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            gauss += WG[j // 2] * (f1 + f2)
    err[0] = fabs((kron - gauss) * half)
    return kron * half


cdef double _adaptive(double a, double b, double slope, double freq, double phase,
                      double tol, int depth) nogil:
    cdef double err
    cdef double value = _gk15(a, b, slope, freq, phase, &err)
    if err <= tol or depth >= MAX_DEPTH or err <= ROUNDOFF * fabs(value):
        return value
    cdef double mid = 0.5 * (a + b)
    return (_adaptive(a, mid, slope, freq, phase, 0.5 * tol, depth + 1)
            + _adaptive(mid, b, slope, freq, phase, 0.5 * tol, depth + 1))


def projected_lengths(amplitudes, spatial_freqs, arc_positions,
                      double phase=0.0, double tol=1e-10):
    """Footprint length u(l) of every tentacle at every arc position.

    ``arc_positions`` must be non-decreasing and non-negative. The error
    budget ``tol`` is shared between consecutive segments in proportion to
    their width, so each returned value carries at most ``tol`` absolute
    quadrature error. Returns an array of shape ``(M, len(arc_positions))``.
    """
    cdef const double[::1] amp = np.ascontiguousarray(amplitudes, dtype=np.float64)
    cdef const double[::1] freq = np.ascontiguousarray(spatial_freqs, dtype=np.float64)
    cdef const double[::1] ell = np.ascontiguousarray(arc_positions, dtype=np.float64)
    cdef Py_ssize_t m_count = amp.shape[0]
    cdef Py_ssize_t l_count = ell.shape[0]
    out_arr = np.zeros((m_count, l_count), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if l_count == 0:
        return out_arr
    cdef double total = ell[l_count - 1]
    cdef Py_ssize_t m, j
    cdef double left, right, acc, slope
    if total <= 0.0:
        return out_arr
    with nogil:
        for m in range(m_count):
            slope = amp[m] * freq[m]
            acc = 0.0
            left = 0.0
            for j in range(l_count):
                right = ell[j]
                if right > left:
                    if slope == 0.0:
                        acc += right - left
                    else:
                        acc += _adaptive(left, right, slope, freq[m], phase,
                                         tol * (right - left) / total, 0)
                out[m, j] = acc
                left = right
    return out_arr
