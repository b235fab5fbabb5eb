"""Renormalized Numerov propagation of the dressed 2x2 radial problem.

psi'' = Q(R) psi,  Q = 2m (V(R) - E),  V = [[v11, v12], [v12, v22]].
With T = h^2 Q / 12 and F = (1 - T) psi the recurrence is
F[n+1] = U[n] F[n] - F[n-1],  U = 12 (1 - T)^-1 - 10.
Ratios R[n] = F[n+1] F[n]^-1 (outward) and S[n] = F[n-1] F[n]^-1 (inward)
stay bounded in closed channels, which is the point of the method.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _inv2(a, b, c, d):
    det = a * d - b * c
    return d / det, -b / det, -c / det, a / det


@njit(cache=True)
def _u_matrix(v11, v12, v22, e, two_m, h2_12):
    # 1 - T
    t11 = 1.0 - h2_12 * two_m * (v11 - e)
    t12 = -h2_12 * two_m * v12
    t22 = 1.0 - h2_12 * two_m * (v22 - e)
    i11, i12, i21, i22 = _inv2(t11, t12, t12, t22)
    return 12.0 * i11 - 10.0, 12.0 * i12, 12.0 * i21, 12.0 * i22 - 10.0


@njit(cache=True)
def outward_ratio(v11, v12, v22, e, two_m, h, imatch):
    """R[imatch] for the solution regular (psi = 0) at grid point 0."""
    h2_12 = h * h / 12.0
    # R[0]^-1 = 0, so R[1] = U[1]
    r11, r12, r21, r22 = _u_matrix(v11[1], v12[1], v22[1], e, two_m, h2_12)
    for n in range(2, imatch + 1):
        u11, u12, u21, u22 = _u_matrix(v11[n], v12[n], v22[n], e, two_m, h2_12)
        i11, i12, i21, i22 = _inv2(r11, r12, r21, r22)
        r11, r12, r21, r22 = u11 - i11, u12 - i12, u21 - i21, u22 - i22
    return np.array([[r11, r12], [r21, r22]])


@njit(cache=True)
def inward_ratio(v11, v12, v22, e, two_m, h, imatch, s_end):
    """S[imatch + 1] propagated inward from S[N-1] = s_end."""
    h2_12 = h * h / 12.0
    n_last = v11.shape[0] - 1
    s11, s12, s21, s22 = s_end[0, 0], s_end[0, 1], s_end[1, 0], s_end[1, 1]
    for n in range(n_last - 1, imatch, -1):
        u11, u12, u21, u22 = _u_matrix(v11[n], v12[n], v22[n], e, two_m, h2_12)
        i11, i12, i21, i22 = _inv2(s11, s12, s21, s22)
        s11, s12, s21, s22 = u11 - i11, u12 - i12, u21 - i21, u22 - i22
    return np.array([[s11, s12], [s21, s22]])


@njit(cache=True)
def single_channel_solution(v, e, two_m, h):
    """Regular real solution of psi'' = 2m(v - e) psi by plain Numerov.

    Grows exponentially in closed regions, so only use it where the channel
    is open (continuum functions) or on short closed stretches.
    """
    n = v.shape[0]
    psi = np.zeros(n)
    h2_12 = h * h / 12.0
    psi[1] = 1e-30
    f_prev = 0.0
    f_cur = (1.0 - h2_12 * two_m * (v[1] - e)) * psi[1]
    for k in range(1, n - 1):
        t = 1.0 - h2_12 * two_m * (v[k] - e)
        u = 12.0 / t - 10.0
        f_next = u * f_cur - f_prev
        t_next = 1.0 - h2_12 * two_m * (v[k + 1] - e)
        psi[k + 1] = f_next / t_next
        f_prev, f_cur = f_cur, f_next
        if abs(psi[k + 1]) > 1e200:
            psi[: k + 2] *= 1e-200
            f_prev *= 1e-200
            f_cur *= 1e-200
    return psi
