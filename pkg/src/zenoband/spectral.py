"""Spectral-function route to the survival probability.

An independent solution path: the atom's self-energy over the renormalized
continuum gives the line shape A(E), whose Fourier transform is the survival
amplitude.  Everything here consumes a :class:`FormFactorGrid` and never
touches the discretized propagation model, so agreement between the two
routes is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import sici

from ._phi import phi_functions
from .errors import EdgeProximity, HorizonExceeded, UnderResolvedOscillation, WindowTooNarrow
from .formfactor import FormFactorGrid, free_value, renormalized_form_factor
from .model import ValidatedModel

__all__ = [
    "SpectralFunction",
    "self_energy",
    "spectral_function",
    "survival_amplitude_spectral",
    "perturbative_decay",
    "stage_rates",
]


@dataclass(frozen=True)
class SpectralFunction:
    """Line shape A(E) of the excited state, normalized to unit area."""

    E: np.ndarray
    A: np.ndarray
    normalization_defect: float
    omega: float
    gamma: float
    window: Tuple[float, float]


def _refined_nodes(grid: FormFactorGrid, per_cell: int = 4) -> np.ndarray:
    """Grid nodes plus uniform subdivision of every cell."""
    mu = grid.mu
    parts = [mu]
    for j in range(1, per_cell):
        parts.append(mu[:-1] + np.diff(mu) * (j / per_cell))
    return np.sort(np.concatenate(parts))


def _subtracted_integral(nodes, g2n, E, g2E, dg2E, local):
    """Int (g2(mu) - g2(E)) / (E - mu) dmu over the window nodes."""
    denom = E - nodes
    tiny = np.abs(denom) < 1e-9 * local
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (g2n - g2E) / denom
    f = np.where(tiny, -dg2E, f)
    return np.trapezoid(f, nodes)


def self_energy(grid: FormFactorGrid, E: float) -> complex:
    """Sigma(E + i0) over the renormalized continuum.

    Real part: principal value of Int g2(mu)/(E - mu) dmu, computed by
    subtracting the singularity on the grid window.  The window log term
    g2(E)*ln((E - lo)/(hi - E)) combines with the free-value tails outside
    the window into (g2(E) - gamma/2pi)*ln((E - lo)/(hi - E)), which makes
    the flat case give exactly Re Sigma = 0 at every E.
    Imaginary part: -pi * g2(E) from the interpolated grid.
    """
    lo, hi = grid.window
    sp_lo = grid.mu[1] - grid.mu[0]
    sp_hi = grid.mu[-1] - grid.mu[-2]
    if E < lo + 5 * sp_lo or E > hi - 5 * sp_hi:
        raise EdgeProximity(
            f"E={E} is within 5 grid spacings of the window edge {grid.window}")
    spline = grid.interpolator()
    nodes = _refined_nodes(grid)
    g2n = spline(nodes)
    g2E = float(spline(E))
    dg2E = float(spline.derivative()(E))
    local = float(np.interp(E, grid.mu[:-1], np.diff(grid.mu)))
    re = _subtracted_integral(nodes, g2n, E, g2E, dg2E, local)
    re += (g2E - free_value(grid.gamma)) * math.log(abs((E - lo) / (hi - E)))
    return complex(re, -math.pi * g2E)


def _self_energy_real_many(grid: FormFactorGrid, Es: np.ndarray) -> np.ndarray:
    """Vectorized Re Sigma over many energies (same formula as self_energy)."""
    lo, hi = grid.window
    spline = grid.interpolator()
    nodes = _refined_nodes(grid)
    g2n = spline(nodes)
    g2E = spline(Es)
    dg2E = spline.derivative()(Es)
    local = np.interp(Es, grid.mu[:-1], np.diff(grid.mu))
    out = np.empty_like(Es)
    free = free_value(grid.gamma)
    for i, E in enumerate(Es):
        val = _subtracted_integral(nodes, g2n, E, g2E[i], dg2E[i], local[i])
        val += (g2E[i] - free) * math.log(abs((E - lo) / (hi - E)))
        out[i] = val
    return out


def _line_parameters(grid: FormFactorGrid, omega: float):
    """Center and half-width of the dressed line."""
    g2_line = float(grid.interpolator()(omega))
    shift = float(self_energy(grid, omega).real)
    return omega + shift, math.pi * g2_line


def _ladder(start, stop, s0, ratio):
    """Geometric march from ``start`` toward ``stop`` with initial step s0."""
    pts = []
    x, s = start, s0
    sgn = 1.0 if stop > start else -1.0
    while True:
        x = x + sgn * s
        if (stop - x) * sgn <= 0:
            break
        pts.append(x)
        s *= ratio
    return pts


def spectral_function(grid: FormFactorGrid, omega: float,
                      window: Optional[Tuple[float, float]] = None,
                      n_points: int = 1200) -> SpectralFunction:
    """Normalized line shape A(E) = g2 / ((E - omega - Re Sigma)^2 + (pi g2)^2).

    The energy grid is dense across the dressed line (whose width can be far
    below the free linewidth when the decay is suppressed), marches
    geometrically out to the window edges, and is refined 4x everywhere so
    that piecewise-linear quadratures of A stay inside the normalization
    budget.  The unit-area check adds the analytic 1/(E-omega)^2 tail mass
    for the region beyond the window.
    """
    lo_g, hi_g = grid.window
    sp_lo = grid.mu[1] - grid.mu[0]
    sp_hi = grid.mu[-1] - grid.mu[-2]
    if window is None:
        window = (lo_g + 6 * sp_lo, hi_g - 6 * sp_hi)
    lo, hi = window
    if not (lo_g < lo < hi < hi_g):
        raise WindowTooNarrow(f"spectral window {window} must lie inside {grid.window}")
    center, half_w = _line_parameters(grid, omega)
    span = 45.0 * half_w
    if center - span <= lo or center + span >= hi:
        raise WindowTooNarrow(
            f"window {window} cannot hold the line region {center}+-{span:g}")

    fine = np.linspace(center - span, center + span, max(n_points, 400))
    step0 = 2.0 * span / max(n_points, 400) * 4.0
    parts = [fine,
             _ladder(center + span, hi, step0, 1.05),
             _ladder(center - span, lo, step0, 1.05),
             grid.mu[(grid.mu > lo) & (grid.mu < hi)],
             [lo, hi]]
    E = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts if len(p)]))
    E = E[(E >= lo) & (E <= hi)]
    # 4x refinement so linear interpolants of A are quadrature-grade
    mids = [E[:-1] + np.diff(E) * f for f in (0.25, 0.5, 0.75)]
    E = np.unique(np.concatenate([E] + mids))
    # midpoint insertion can round onto an existing float; drop zero cells
    E = E[np.concatenate([[True], np.diff(E) > 1e-13 * (hi - lo)])]

    re_sigma = _self_energy_real_many(grid, E)
    g2E = grid.interpolator()(E)
    A = g2E / ((E - omega - re_sigma) ** 2 + (math.pi * g2E) ** 2)
    if A[0] > 1e-6 * A.max() or A[-1] > 1e-6 * A.max():
        raise WindowTooNarrow(
            "A(E) has not decayed to 1e-6 of its peak at the spectral window edge")
    area = float(np.trapezoid(A, E))
    # analytic mass of the (gamma/2pi)/(E-omega)^2 tails beyond the window
    tail = free_value(grid.gamma) * (1.0 / (hi - omega) + 1.0 / (omega - lo))
    defect = abs(1.0 - (area + tail))
    return SpectralFunction(E=E, A=A, normalization_defect=defect,
                            omega=omega, gamma=grid.gamma, window=(lo, hi))


def survival_amplitude_spectral(sf: SpectralFunction, t) -> np.ndarray:
    """f(t) = Int A(E) e^{-iEt} dE, piecewise-exact against the linear interpolant.

    Each cell integrates (linear A) * e^{-iEt} in closed form, so the cell
    size is limited by how well A is linear, not by the phase t*dE.  The
    analytic free-tail transform is added for |E - omega| beyond the window.
    Times beyond the resolution horizon of the mass-carrying region raise
    :class:`HorizonExceeded`.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    E, A = sf.E, sf.A
    core = A > 1e-3 * A.max()
    if core.sum() >= 2:
        d_core = np.diff(E)[core[:-1] & core[1:]]
        horizon = 2.0 * np.pi / (4.0 * d_core.max()) if d_core.size else np.inf
    else:
        horizon = np.inf
    if np.any(t_arr < 0.0):
        raise ValueError("t must be >= 0")
    if np.any(t_arr > horizon):
        raise HorizonExceeded(
            f"t up to {t_arr.max():g} exceeds the spectral horizon {horizon:g}")

    w = np.diff(E)
    a = A[:-1]
    b = np.diff(A) / w
    lo, hi = sf.window
    Wp = hi - sf.omega
    Wm = sf.omega - lo
    pref = free_value(sf.gamma)
    out = np.empty(len(t_arr), dtype=complex)
    for i, tt in enumerate(t_arr):
        z = -1j * tt * w
        p1, p2 = phi_functions(z, 2)
        m0 = w * p1
        m1 = w ** 2 * (p1 - p2)
        cells = np.exp(-1j * tt * E[:-1]) * (a * m0 + b * m1)
        val = cells.sum()
        # analytic tails: A ~ (gamma/2pi)/(E-omega)^2 outside the window
        for sgn, W in ((+1, Wp), (-1, Wm)):
            x = W * tt
            if tt == 0.0:
                c_int, s_int = 1.0 / W, 0.0
            else:
                si, ci = sici(x)
                c_int = math.cos(x) / W - tt * (math.pi / 2.0 - si)
                s_int = math.sin(x) / W - tt * ci
            val += pref * np.exp(-1j * tt * sf.omega) * (c_int - 1j * sgn * s_int)
        out[i] = val
    return out if np.ndim(t) else out[0]


def perturbative_decay(grid: FormFactorGrid, omega: float, t,
                       points_per_period: int = 16,
                       max_points: int = 2_000_000) -> np.ndarray:
    """Lowest-order decay probability 1 - s(t).

    1 - s(t) = Int dmu g2(mu) sin^2((mu-omega)t/2) / ((mu-omega)/2)^2.

    The free part integrates to gamma*t exactly and is added in closed form;
    the deviation (g2 - gamma/2pi) is integrated numerically with at least
    ``points_per_period`` samples per oscillation period of the sinc^2 kernel
    at the largest requested time.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0):
        raise ValueError("t must be >= 0")
    lo, hi = grid.window
    t_max = t_arr.max()
    spacing = (2.0 * np.pi / t_max) / points_per_period if t_max > 0 else (hi - lo)
    n_unif = int(np.ceil((hi - lo) / spacing)) + 1
    if n_unif > max_points:
        raise UnderResolvedOscillation(
            f"{n_unif} sample points needed for t={t_max:g}; cap is {max_points}")
    nodes = np.unique(np.concatenate([np.linspace(lo, hi, max(n_unif, 2)), grid.mu]))
    g2dev = grid.interpolator()(nodes) - free_value(grid.gamma)
    x = nodes - omega
    out = np.empty(len(t_arr))
    for i, tt in enumerate(t_arr):
        if tt == 0.0:
            out[i] = 0.0
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.sin(x * tt / 2.0) ** 2 / (x / 2.0) ** 2
        kern = np.where(np.abs(x) < 1e-30, tt ** 2, kern)
        out[i] = grid.gamma * tt + np.trapezoid(g2dev * kern, nodes)
    return out if np.ndim(t) else out[0]


def stage_rates(m: ValidatedModel, tol: Optional[float] = None):
    """(free rate, suppressed rate) = (gamma, 2 pi g2(omega))."""
    tol = tol if tol is not None else m.numerics.quad_tol
    g2_line = renormalized_form_factor(m.band, m.gamma, m.omega, tol)
    return m.gamma, 2.0 * math.pi * g2_line
