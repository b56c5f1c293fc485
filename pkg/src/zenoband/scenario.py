"""Scenario orchestration: products, figure reproductions, sweeps, CSV output.

Each product is a pure function of a scenario; outputs are plot-ready CSV
files written atomically (temp file + rename) with deterministic formatting,
so reruns with the same config are byte-identical.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import MODEL_KEYS, model_params_from_dict, parse_kv_text
from .errors import ConfigError, NoResponse, WindowTooNarrow
from .formfactor import form_factor_grid, free_value, renormalized_form_factor, sum_rule_defect
from .model import DetectorBand, ModelParams, validate_params, qze_condition_report
from .dynamics import discretize_continuum, propagate, response_delay, decay_rate_trace
from .spectral import perturbative_decay, spectral_function, stage_rates, survival_amplitude_spectral

__all__ = [
    "ScenarioConfig",
    "load_scenario",
    "run_scenario",
    "PRODUCTS",
    "FIG1_DEFAULTS",
    "FIG2_RATIOS",
    "FIG3_SETS",
    "write_csv",
    "read_csv",
]

PRODUCTS = ("formfactor", "evolve", "spectral", "report", "fig1", "fig2", "fig3")

SCENARIO_KEYS = {"products", "sweep_eta", "sweep_delta", "sweep_detuning", "out"}

# Figure defaults in units of gamma = 1 (band half-width from 2*pi*Delta/gamma).
FIG1_DEFAULTS = {"gamma": "1", "delta": repr(100.0 / (2.0 * math.pi)), "eta": "1.5", "n": "6"}
FIG2_RATIOS = (0.01, 0.1, 1.0)  # eta / (2 pi Delta)
FIG2_DEFAULTS = {"gamma": "1", "delta": repr(100.0 / (2.0 * math.pi)), "n": "6"}
FIG3_SETS = ((100.0, 100.0), (100.0, 10.0), (1000.0, 1000.0))  # {2piDelta/gamma, eta/gamma}
FIG3_DEFAULTS = {"gamma": "1", "n": "6"}


@dataclass(frozen=True)
class ScenarioConfig:
    """A parsed scenario: model parameters plus what to run and where.

    ``explicit`` records which model keys the user actually wrote (config
    file or --override); figure products keep their cited parameter sets for
    everything the user did not explicitly pin.
    """

    params: ModelParams
    products: Tuple[str, ...]
    out_dir: str = "out"
    sweep_eta: Tuple[float, ...] = ()
    sweep_delta: Tuple[float, ...] = ()
    sweep_detuning: Tuple[float, ...] = ()
    threads: int = 1
    explicit: frozenset = frozenset()


def load_scenario(path=None, overrides: Optional[Dict[str, str]] = None,
                  products: Sequence[str] = (), out_dir: Optional[str] = None,
                  threads: int = 1, defaults: Optional[Dict[str, str]] = None) -> ScenarioConfig:
    """Assemble a scenario from defaults, a config file, and CLI overrides."""
    explicit_kv: Dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            explicit_kv.update(parse_kv_text(fh.read()))
    explicit_kv.update(overrides or {})
    kv = dict(defaults or {})
    kv.update(explicit_kv)

    unknown = sorted(set(kv) - MODEL_KEYS - SCENARIO_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    def _floats(key):
        if key not in kv:
            return ()
        try:
            vals = tuple(float(x) for x in kv[key].split(",") if x.strip())
        except ValueError:
            raise ConfigError(f"key {key!r}: expected comma-separated numbers") from None
        if not vals:
            raise ConfigError(f"key {key!r}: sweep list is empty")
        return vals

    prods = tuple(products) or tuple(
        p.strip() for p in kv.get("products", "").split(",") if p.strip())
    bad = [p for p in prods if p not in PRODUCTS]
    if bad:
        raise ConfigError(f"unknown product(s): {', '.join(bad)}")

    model_kv = {k: v for k, v in kv.items() if k in MODEL_KEYS}
    if "gamma" not in model_kv:
        model_kv["gamma"] = "1"
    params = model_params_from_dict(model_kv)
    return ScenarioConfig(
        params=params,
        products=prods,
        out_dir=out_dir or kv.get("out", "out"),
        sweep_eta=_floats("sweep_eta"),
        sweep_delta=_floats("sweep_delta"),
        sweep_detuning=_floats("sweep_detuning"),
        threads=threads,
        explicit=frozenset(explicit_kv) & MODEL_KEYS,
    )


def write_csv(path, header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    """Atomically write plot-ready CSV with a mandatory header row."""
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("csv columns must have equal length")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(repr(float(c[i])) for c in cols) + "\n")
    os.replace(tmp, path)
    return path


def read_csv(path):
    """Read back a CSV written by :func:`write_csv` as (header, columns)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, [data[:, i] for i in range(data.shape[1])]


def _write_text(path, lines: List[str]) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    return path


def _evolve_samples(m) -> np.ndarray:
    return np.linspace(0.0, m.numerics.horizon, 501)


def _fig3_samples(m) -> np.ndarray:
    T = m.numerics.horizon
    log_part = np.geomspace(1e-2 / m.band.delta, T, 121)
    return np.unique(np.concatenate([[0.0], log_part, np.linspace(0.0, T, 501)]))


def product_report(cfg: ScenarioConfig, out_dir: str):
    m = validate_params(cfg.params)
    rep = qze_condition_report(m)
    lines = [
        f"gamma/Delta = {rep.ratio_linewidth:.6g}",
        f"tau*Delta   = {rep.ratio_response:.6g}",
        f"suppression estimate 2*pi*|g_Omega|^2/gamma = {rep.suppression_estimate:.6g}",
        f"verdict: {rep.verdict}",
    ]
    path = _write_text(os.path.join(out_dir, "report.txt"), lines)
    return [path], [f"report: {rep.verdict} (gamma/Delta={rep.ratio_linewidth:.4g}, "
                    f"tau*Delta={rep.ratio_response:.4g}, "
                    f"suppression~{rep.suppression_estimate:.4g})"]


def product_formfactor(cfg: ScenarioConfig, out_dir: str):
    m = validate_params(cfg.params)
    grid = form_factor_grid(m.band, m.gamma, tol=m.numerics.quad_tol)
    path = write_csv(os.path.join(out_dir, "formfactor.csv"),
                     ["mu", "g2", "g2_over_free"],
                     [grid.mu, grid.g2, grid.g2 / free_value(m.gamma)])
    g2_line = renormalized_form_factor(m.band, m.gamma, m.omega, m.numerics.quad_tol)
    summary = (f"formfactor: g2(omega)={g2_line:.6e}, "
               f"suppression={2 * math.pi * g2_line / m.gamma:.6f}")
    try:
        summary += f", sum_rule_defect={sum_rule_defect(grid, m.gamma):.3e}"
    except WindowTooNarrow:
        summary += ", sum_rule_defect=n/a (window too narrow)"
    return [path], [summary]


def product_evolve(cfg: ScenarioConfig, out_dir: str):
    m = validate_params(cfg.params)
    trace = propagate(discretize_continuum(m), _evolve_samples(m))
    path = write_csv(os.path.join(out_dir, "evolve.csv"),
                     ["t", "s", "eps", "r", "norm_defect"],
                     [trace.t, trace.s, trace.eps, trace.r, trace.norm_defect])
    summary = (f"evolve: s(T)={trace.s[-1]:.6f}, r(T)={trace.r[-1]:.6f}, "
               f"max_norm_defect={trace.norm_defect.max():.3e}")
    try:
        summary += f", response_delay={response_delay(trace):.4f}"
    except NoResponse:
        summary += ", response_delay=n/a"
    return [path], [summary]


def product_spectral(cfg: ScenarioConfig, out_dir: str):
    m = validate_params(cfg.params)
    grid = form_factor_grid(m.band, m.gamma, tol=m.numerics.quad_tol)
    sf = spectral_function(grid, m.omega)
    paths = [write_csv(os.path.join(out_dir, "spectral.csv"), ["E", "A"], [sf.E, sf.A])]
    t = _evolve_samples(m)
    pert = perturbative_decay(grid, m.omega, t)
    paths.append(write_csv(os.path.join(out_dir, "perturbative.csv"),
                           ["t", "one_minus_s_pert"], [t, pert]))
    s_spec = np.abs(survival_amplitude_spectral(sf, t)) ** 2
    paths.append(write_csv(os.path.join(out_dir, "survival_spectral.csv"),
                           ["t", "s"], [t, s_spec]))
    free, supp = stage_rates(m)
    return paths, [(f"spectral: normalization_defect={sf.normalization_defect:.3e}, "
                    f"rates free={free:.6g} suppressed={supp:.6g}")]


def product_fig1(cfg: ScenarioConfig, out_dir: str):
    m = validate_params(cfg.params)
    trace = propagate(discretize_continuum(m), _evolve_samples(m))
    path = write_csv(os.path.join(out_dir, "fig1.csv"),
                     ["t", "one_minus_s", "eps", "r"],
                     [trace.t, 1.0 - trace.s, trace.eps, trace.r])
    if m.band.eta > 0:
        tau = 1.0 / m.band.eta
        try:
            delay = response_delay(trace)
            delay_txt = f"{delay:.4f} (tau={tau:.4f}, delay/tau={delay / tau:.3f})"
        except NoResponse:
            delay_txt = "n/a"
    else:
        delay_txt = "n/a"
    return [path], [f"fig1: r(T)={trace.r[-1]:.4f}, response_delay={delay_txt}"]


def product_fig2(cfg: ScenarioConfig, out_dir: str):
    base = validate_params(cfg.params)
    paths, lines = [], []
    for ratio in FIG2_RATIOS:
        band = DetectorBand(eta=ratio * 2.0 * math.pi * base.band.delta,
                            delta=base.band.delta, n=base.band.n,
                            center=base.band.center)
        grid = form_factor_grid(band, base.gamma, tol=base.numerics.quad_tol)
        tag = f"{ratio:g}".replace(".", "p")
        paths.append(write_csv(os.path.join(out_dir, f"fig2_ratio{tag}.csv"),
                               ["mu", "g2", "g2_over_free"],
                               [grid.mu, grid.g2, grid.g2 / free_value(base.gamma)]))
        g2_line = renormalized_form_factor(band, base.gamma, base.omega,
                                           base.numerics.quad_tol)
        lines.append(f"fig2 eta/2piDelta={ratio:g}: g2(omega)/free="
                     f"{g2_line / free_value(base.gamma):.6f}")
    return paths, lines


def _fig3_band(cfg: ScenarioConfig, two_pi_delta: float, eta: float) -> DetectorBand:
    """Cited parameter set, except where the user pinned eta/delta explicitly."""
    gamma = cfg.params.gamma
    band = cfg.params.band
    return DetectorBand(
        eta=band.eta if "eta" in cfg.explicit else eta * gamma,
        delta=band.delta if "delta" in cfg.explicit else two_pi_delta * gamma / (2 * math.pi),
        n=band.n,
        center=band.center,
    )


def product_fig3(cfg: ScenarioConfig, out_dir: str):
    paths, lines = [], []
    for two_pi_delta, eta in FIG3_SETS:
        band = _fig3_band(cfg, two_pi_delta, eta)
        m = validate_params(replace(cfg.params, band=band))
        trace = propagate(discretize_continuum(m), _fig3_samples(m))
        t_pos, rate = decay_rate_trace(trace)
        _, supp = stage_rates(m)
        ref_s = -supp / m.gamma
        tag = f"{int(two_pi_delta)}_{int(eta)}"
        paths.append(write_csv(os.path.join(out_dir, f"fig3_{tag}.csv"),
                               ["t", "lns_over_gamma_t", "ref_free", "ref_suppressed"],
                               [t_pos, rate, np.full_like(t_pos, -1.0),
                                np.full_like(t_pos, ref_s)]))
        lines.append(f"fig3 {{2piDelta/gamma,eta/gamma}}={{{two_pi_delta:g},{eta:g}}}: "
                     f"late rate={rate[-1]:.4f}, suppressed ref={ref_s:.4f}")
    return paths, lines


_PRODUCT_FUNCS = {
    "report": product_report,
    "formfactor": product_formfactor,
    "evolve": product_evolve,
    "spectral": product_spectral,
    "fig1": product_fig1,
    "fig2": product_fig2,
    "fig3": product_fig3,
}


def _run_point(args):
    cfg, out_dir = args
    files, lines = [], []
    for prod in cfg.products:
        f, s = _PRODUCT_FUNCS[prod](cfg, out_dir)
        files += f
        lines += s
    return files, lines


def _sweep_points(cfg: ScenarioConfig):
    etas = cfg.sweep_eta or (None,)
    deltas = cfg.sweep_delta or (None,)
    dets = cfg.sweep_detuning or (None,)
    for eta in etas:
        for delta in deltas:
            for det in dets:
                band = cfg.params.band
                new_band = DetectorBand(
                    eta=band.eta if eta is None else eta,
                    delta=band.delta if delta is None else delta,
                    n=band.n,
                    center=band.center if det is None else cfg.params.omega + det,
                )
                tags = [f"eta{eta:g}" if eta is not None else "",
                        f"delta{delta:g}" if delta is not None else "",
                        f"det{det:g}" if det is not None else ""]
                sub = "_".join(t for t in tags if t) or "point"
                params = replace(cfg.params, band=new_band)
                explicit = cfg.explicit | ({"eta"} if eta is not None else set()) \
                    | ({"delta"} if delta is not None else set())
                yield (replace(cfg, params=params, explicit=frozenset(explicit)),
                       os.path.join(cfg.out_dir, sub))


def run_scenario(cfg: ScenarioConfig) -> Tuple[List[str], List[str]]:
    """Execute every requested product; returns (output files, summary lines)."""
    if not cfg.products:
        raise ConfigError("no products requested")
    if not (cfg.sweep_eta or cfg.sweep_delta or cfg.sweep_detuning):
        return _run_point((cfg, cfg.out_dir))
    points = list(_sweep_points(cfg))
    files, lines = [], []
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_run_point, points))
    else:
        results = [_run_point(p) for p in points]
    for f, s in results:
        files += f
        lines += s
    return files, lines
