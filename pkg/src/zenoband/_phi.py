"""Stable evaluation of the exponential phi functions.

phi_j(z) = (e^z - sum_{m<j} z^m/m!) / z^j, the building blocks of
exponential integrators and of exact oscillatory moments.  Closed forms
cancel catastrophically for small |z|, so a Taylor series takes over there.
"""

from __future__ import annotations

import math

import numpy as np

_SMALL = 0.5
_TERMS = 20


def phi_functions(z, nmax: int = 3):
    """Return [phi_1(z), ..., phi_nmax(z)] elementwise for complex ``z``."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SMALL
    zb = np.where(small, 1.0, z)
    ez = np.exp(np.where(small, 0.0, z))
    closed = []
    partial = np.ones_like(z)
    zpow = np.ones_like(z)
    for j in range(1, nmax + 1):
        closed.append((ez - partial) / zb ** j)
        zpow = zpow * z
        partial = partial + zpow / math.factorial(j)
    zs = np.where(small, z, 0.0)
    taylor = [np.zeros_like(z) for _ in range(nmax)]
    term = np.ones_like(z)
    for m in range(_TERMS):
        for j in range(1, nmax + 1):
            taylor[j - 1] = taylor[j - 1] + term / math.factorial(m + j)
        term = term * zs
    return [np.where(small, taylor[j], closed[j]) for j in range(nmax)]
