"""Gauss-Legendre quadrature with a cosine map that tames sqrt endpoints.

R = a + (b - a) (1 - cos t) / 2 with t in [0, pi].  An integrand behaving
like (R - a)^(+-1/2) at either end becomes analytic in t, so the rule
converges spectrally for actions and classical periods alike.
"""

from functools import lru_cache

import numpy as np

DEFAULT_ORDER = 96


@lru_cache(maxsize=16)
def _rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * np.pi * (x + 1.0)
    return t, 0.5 * np.pi * w


def mapped_nodes(a, b, order=DEFAULT_ORDER):
    """Nodes R_i and weights w_i with sum w_i f(R_i) ~ int_a^b f dR."""
    t, w = _rule(order)
    half = 0.5 * (b - a)
    r = a + half * (1.0 - np.cos(t))
    return r, w * half * np.sin(t)
