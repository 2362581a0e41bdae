"""Config-driven experiment campaigns: formula constants vs. direct searches.

A campaign file is a sequence of `[experiment]` blocks of `key = value`
lines (no nesting, `#` comments).  Each experiment computes characterization
constants for one weight configuration, optionally runs the brute-force
search against them, and is judged against its declared ratio bounds.  The
CSV report is deterministic: identical config and seed give byte-identical
output (timings live in the human-readable summary only).

Recognized keys, with defaults in brackets:

    id            experiment name [exp<N>]
    mode          iterated | monotone | discrete | lemmas [iterated]
    p, q, r       exponents (r omitted in monotone mode)
    interval      two endpoints, e.g. ``0 1`` or ``0 inf`` [0 1]
    u, v, w       weight specs (``unit``, ``powerlaw C ALPHA BETA``,
                  ``piecewise x0 v0 x1 ...``, ``tabulated ...``) [unit]
    scale_u/v/w   multiply the weight by a constant [1]
    grid_size     quadrature cells [1024]        order   nodes per cell [6]
    search_budget ratio evaluations for the search; 0 = constants only [0]
    trunc_depth   deepest index of the discretizing sequence [16]
    seed          RNG seed for searches and lemma draws [0]
    n_checks      randomized draws in lemmas mode [50]
    min_ratio     declared lower bound on the checked ratio [mode default]
    max_ratio     declared upper bound on the checked ratio [mode default]

The checked ratio is search/combined for iterated and monotone modes (only
when a search runs), discrete-combined/continuous-combined for discrete
mode, and each sampled lhs/rhs for lemmas mode.
"""

from __future__ import annotations

import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .characterization import (continuous_constants, discrete_constants,
                               monotone_constants)
from .discretization import (LEMMA_KINDS, build_discretizing_sequence,
                             lemma_pair)
from .errors import ConfigError, HardyLabError
from .extreal import INF, div0
from .measure import (Exponents, Interval, PowerLaw, Weight, parse_weight,
                      unit_weight)
from .oracle import best_constant_search

SCHEMA_VERSION = 1
MODES = ("iterated", "monotone", "discrete", "lemmas")
SEED_ENV = "HARDY_LAB_SEED"

_CSV_COLUMNS = (
    "id", "mode", "regime", "p", "q", "r", "a", "b", "grid_size", "seed",
    "sweep_param", "sweep_value", "constants", "combined", "finite",
    "oracle", "oracle_evaluations", "escalated", "ratio",
    "bound_low", "bound_high", "passed", "detail",
)

_DEFAULT_BOUNDS = {
    "iterated": (1.0 / 256.0, 16.0),
    "monotone": (1.0 / 256.0, 16.0),
    "discrete": (1.0 / 256.0, 256.0),
    "lemmas": (1.0 / 64.0, 64.0),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One parsed [experiment] block."""

    id: str
    mode: str
    p: float | None
    q: float | None
    r: float | None
    interval: Interval
    u: Weight
    v: Weight
    w: Weight
    grid_size: int = 1024
    order: int = 6
    search_budget: int = 0
    trunc_depth: int = 16
    seed: int = 0
    n_checks: int = 50
    scale_u: float = 1.0
    scale_v: float = 1.0
    scale_w: float = 1.0
    min_ratio: float | None = None
    max_ratio: float | None = None
    sweep_param: str = ""
    sweep_value: str = ""

    def bounds(self) -> tuple[float, float]:
        lo, hi = _DEFAULT_BOUNDS[self.mode]
        return (self.min_ratio if self.min_ratio is not None else lo,
                self.max_ratio if self.max_ratio is not None else hi)

    def weights(self) -> tuple[Weight, Weight, Weight]:
        return (self.u.scaled(self.scale_u), self.v.scaled(self.scale_v),
                self.w.scaled(self.scale_w))


@dataclass
class ExperimentResult:
    """One campaign row; everything the pass/fail verdict depends on."""

    config: ExperimentConfig
    regime: str = ""
    constants: dict[str, float] = field(default_factory=dict)
    combined: float | None = None
    finite: bool | None = None
    oracle: float | None = None
    oracle_evaluations: int = 0
    escalated: bool = False
    ratio: float | None = None
    bound_low: float | None = None
    bound_high: float | None = None
    passed: bool = False
    detail: str = ""
    seconds: float = 0.0


@dataclass
class CampaignReport:
    results: list[ExperimentResult]
    aborted: bool = False

    @property
    def passed(self) -> bool:
        return not self.aborted and all(r.passed for r in self.results)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# hardylab report schema v{SCHEMA_VERSION}\n")
        out.write(",".join(_CSV_COLUMNS) + "\n")
        for res in self.results:
            cfg = res.config
            consts = ";".join(f"{k}={_fmt(v)}" for k, v in res.constants.items())
            row = (
                cfg.id, cfg.mode, res.regime, _fmt(cfg.p), _fmt(cfg.q),
                _fmt(cfg.r), _fmt(cfg.interval.a), _fmt(cfg.interval.b),
                str(cfg.grid_size), str(cfg.seed), cfg.sweep_param,
                cfg.sweep_value, consts, _fmt(res.combined),
                _fmt_bool(res.finite), _fmt(res.oracle),
                str(res.oracle_evaluations), _fmt_bool(res.escalated),
                _fmt(res.ratio), _fmt(res.bound_low), _fmt(res.bound_high),
                _fmt_bool(res.passed), res.detail.replace(",", ";"),
            )
            out.write(",".join(row) + "\n")
        return out.getvalue()

    def summary(self) -> str:
        n_pass = sum(r.passed for r in self.results)
        total = sum(r.seconds for r in self.results)
        lines = [f"campaign: {len(self.results)} experiments, {n_pass} passed, "
                 f"{len(self.results) - n_pass} failed ({total:.1f}s total)"]
        if self.aborted:
            lines[0] += "  [aborted by --fail-fast]"
        for res in self.results:
            tag = "PASS" if res.passed else "FAIL"
            bits = [f"[{tag}] {res.config.id} {res.config.mode}"]
            if res.regime:
                bits.append(f"regime {res.regime}")
            if res.combined is not None:
                bits.append(f"combined={_fmt_short(res.combined)}")
            if res.oracle is not None:
                bits.append(f"search={_fmt_short(res.oracle)}")
            if res.ratio is not None:
                bits.append(f"ratio={_fmt_short(res.ratio)}")
            if res.detail:
                bits.append(res.detail)
            bits.append(f"({res.seconds:.2f}s)")
            lines.append("  " + " ".join(bits))
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def _fmt_bool(x) -> str:
    return "" if x is None else ("true" if x else "false")


def _fmt_short(x: float) -> str:
    return f"{x:.6g}"


# -- config parsing ------------------------------------------------------------


def parse_config(text: str, *, path: str = "<config>") -> list[ExperimentConfig]:
    """Parse a campaign file into experiment configs.

    Raises ConfigError with file:line positions for malformed lines,
    unknown keys, and invalid values (including exponent combinations the
    inequality itself rules out).
    """
    blocks: list[dict[str, tuple[str, int]]] = []
    current: dict[str, tuple[str, int]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if line != "[experiment]":
                raise ConfigError(f"{path}:{lineno}: unknown section {line!r} "
                                  "(only [experiment] is recognized)")
            current = {}
            blocks.append(current)
            continue
        if current is None:
            raise ConfigError(f"{path}:{lineno}: key outside an [experiment] block")
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, val = key.strip(), val.strip()
        if key in current:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r} "
                              f"(first set on line {current[key][1]})")
        current[key] = (val, lineno)
    return [_build_config(block, i, path)
            for i, block in enumerate(blocks, start=1)]


def load_config(path: str) -> list[ExperimentConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), path=path)


_INT_KEYS = ("grid_size", "order", "search_budget", "trunc_depth", "seed",
             "n_checks")
_FLOAT_KEYS = ("scale_u", "scale_v", "scale_w", "min_ratio", "max_ratio")
_KNOWN_KEYS = frozenset(("id", "mode", "p", "q", "r", "interval", "u", "v",
                         "w") + _INT_KEYS + _FLOAT_KEYS)


def _build_config(block: dict[str, tuple[str, int]], index: int,
                  path: str) -> ExperimentConfig:
    def where(key: str) -> str:
        return f"{path}:{block[key][1]}"

    for key in block:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{where(key)}: unknown key {key!r}")

    def get(key: str, default=None):
        return block[key][0] if key in block else default

    def number(key: str, default, kind=float):
        if key not in block:
            return default
        try:
            return kind(block[key][0])
        except ValueError as exc:
            raise ConfigError(f"{where(key)}: {key} must be a number: {exc}") from exc

    mode = get("mode", "iterated")
    if mode not in MODES:
        raise ConfigError(f"{where('mode')}: unknown mode {mode!r} "
                          f"(expected one of {', '.join(MODES)})")

    iv_text = get("interval", "0 1").replace(",", " ").split()
    if len(iv_text) != 2:
        key = "interval" if "interval" in block else None
        pos = where("interval") if key else path
        raise ConfigError(f"{pos}: interval needs exactly two endpoints")
    try:
        interval = Interval(float(iv_text[0]), float(iv_text[1]))
    except (ValueError, HardyLabError) as exc:
        raise ConfigError(f"{where('interval')}: bad interval: {exc}") from exc

    p = number("p", None)
    q = number("q", None)
    r = number("r", None)
    if mode in ("iterated", "discrete"):
        for name, val in (("p", p), ("q", q), ("r", r)):
            if val is None:
                raise ConfigError(f"{path}: experiment {index}: {mode} mode "
                                  f"needs exponent {name}")
        if p < 1.0:
            raise ConfigError(
                f"{where('p')}: p = {p:g} < 1: the inequality only holds "
                "for trivial functions")
        if q <= 0 or r <= 0:
            key = "q" if q <= 0 else "r"
            raise ConfigError(f"{where(key)}: exponents must be positive")
    elif mode == "monotone":
        if p is None or q is None:
            raise ConfigError(f"{path}: experiment {index}: monotone mode "
                              "needs exponents p and q")
        if p <= 0 or q <= 0:
            key = "p" if p <= 0 else "q"
            raise ConfigError(f"{where(key)}: exponents must be positive")

    weights = {}
    for key in ("u", "v", "w"):
        text = get(key, "unit")
        try:
            weights[key] = unit_weight(interval) if text == "unit" \
                else parse_weight(text, interval)
        except HardyLabError as exc:
            pos = where(key) if key in block else path
            raise ConfigError(f"{pos}: bad weight {key}: {exc}") from exc

    for key in ("scale_u", "scale_v", "scale_w"):
        if number(key, 1.0) < 0:
            raise ConfigError(f"{where(key)}: scale must be nonnegative")

    exp_id = get("id", f"exp{index}")
    if "," in exp_id:
        raise ConfigError(f"{where('id')}: id may not contain commas")

    return ExperimentConfig(
        id=exp_id,
        mode=mode, p=p, q=q, r=r, interval=interval,
        u=weights["u"], v=weights["v"], w=weights["w"],
        grid_size=max(8, number("grid_size", 1024, int)),
        order=min(16, max(2, number("order", 6, int))),
        search_budget=max(0, number("search_budget", 0, int)),
        trunc_depth=max(2, number("trunc_depth", 16, int)),
        seed=number("seed", 0, int),
        n_checks=max(1, number("n_checks", 50, int)),
        scale_u=number("scale_u", 1.0),
        scale_v=number("scale_v", 1.0),
        scale_w=number("scale_w", 1.0),
        min_ratio=number("min_ratio", None),
        max_ratio=number("max_ratio", None),
    )


# -- running experiments -------------------------------------------------------


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute one experiment; never raises (errors become failed rows)."""
    t0 = time.perf_counter()
    try:
        res = _dispatch(cfg)
    except HardyLabError as exc:
        res = ExperimentResult(config=cfg, passed=False,
                               detail=f"error: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def _judge(res: ExperimentResult, searched: float | None, combined: float,
           escalated: bool):
    """Fill ratio / bounds / passed for a search-vs-formula comparison."""
    lo, hi = res.config.bounds()
    res.bound_low, res.bound_high = lo, hi
    if searched is None:
        res.passed = True
        res.detail = "constants only"
        res.bound_low = res.bound_high = None
        return
    if math.isinf(combined) and (math.isinf(searched) or escalated):
        res.ratio = 1.0
        res.passed = True
        res.detail = "both infinite"
        return
    if combined == 0.0 and searched == 0.0:
        res.ratio = 1.0
        res.passed = True
        res.detail = "both zero"
        return
    res.ratio = float(div0(searched, combined))
    res.passed = lo <= res.ratio <= hi


def _dispatch(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.mode == "lemmas":
        return _run_lemmas(cfg)
    u, v, w = cfg.weights()
    res = ExperimentResult(config=cfg)
    if cfg.mode == "monotone":
        e = Exponents(p=cfg.p, q=cfg.q)
        rep = monotone_constants(e, u, v, w, cfg.interval,
                                 grid_size=cfg.grid_size, order=cfg.order)
    else:
        e = Exponents(p=cfg.p, q=cfg.q, r=cfg.r)
        rep = continuous_constants(e, u, v, w, cfg.interval,
                                   grid_size=cfg.grid_size, order=cfg.order)
    res.regime = rep.regime.value
    res.constants = dict(rep.constants)
    res.combined = rep.combined
    res.finite = rep.finite

    if cfg.mode == "discrete":
        ds = build_discretizing_sequence(w, cfg.interval, k_max=cfg.trunc_depth)
        drep = discrete_constants(e, u, v, ds,
                                  local_grid_size=min(256, cfg.grid_size),
                                  order=cfg.order)
        res.regime = drep.regime.value
        res.constants = dict(drep.constants)
        res.constants["Ccontinuous"] = rep.combined
        res.combined = drep.combined
        res.finite = drep.finite
        lo, hi = cfg.bounds()
        res.bound_low, res.bound_high = lo, hi
        if math.isinf(drep.combined) and math.isinf(rep.combined):
            res.ratio, res.passed, res.detail = 1.0, True, "both infinite"
        elif drep.combined == 0.0 and rep.combined == 0.0:
            res.ratio, res.passed, res.detail = 1.0, True, "both zero"
        else:
            res.ratio = float(div0(drep.combined, rep.combined))
            res.passed = lo <= res.ratio <= hi
        share = max(drep.diagnostics.get("tail_share_A", 0.0),
                    drep.diagnostics.get("tail_share_B", 0.0))
        res.detail = (res.detail + f" tail_share={share:.3g}").strip()
        return res

    if cfg.search_budget > 0:
        est = best_constant_search(
            e, u, v, w, cfg.interval, budget=cfg.search_budget,
            seed=cfg.seed, grid_size=cfg.grid_size, order=cfg.order,
            family="monotone" if cfg.mode == "monotone" else "iterated")
        res.oracle = est.value
        res.oracle_evaluations = est.evaluations
        res.escalated = est.escalated
        _judge(res, est.value, rep.combined, est.escalated)
    else:
        _judge(res, None, rep.combined, False)
    return res


def _run_lemmas(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(config=cfg)
    res.regime = "-"
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds()
    res.bound_low, res.bound_high = lo, hi
    worst_low, worst_high = INF, 0.0
    worst_kind = ""
    for i in range(cfg.n_checks):
        kind = LEMMA_KINDS[i % len(LEMMA_KINDS)]
        lhs, rhs = sample_lemma_pair(kind, rng)
        degenerate = (lhs == 0.0 and rhs == 0.0) or \
            (math.isinf(lhs) and math.isinf(rhs))
        ratio = 1.0 if degenerate else float(div0(lhs, rhs))
        if ratio < worst_low:
            worst_low = ratio
        if ratio > worst_high:
            worst_high, worst_kind = ratio, kind
    res.constants = {"worst_low": worst_low, "worst_high": worst_high}
    res.ratio = worst_high
    res.passed = lo <= worst_low and worst_high <= hi
    res.detail = (f"{cfg.n_checks} draws; ratios in "
                  f"[{worst_low:.4g}; {worst_high:.4g}]; peak {worst_kind}")
    return res


def sample_lemma_pair(kind: str, rng, *, trunc_depth: int = 10
                      ) -> tuple[float, float]:
    """Draw one randomized instance of a comparison lemma and evaluate it.

    The sampling ranges keep the provable equivalence constants of every
    kind well inside [1/64, 64]: the geometric ratio of tau stays below
    0.6 and powers stay in [0.3, 2].  `trunc_depth` sets how deep the
    discretizing sequence runs for the kinds that use one; consuming the
    same generator state with two depths reproduces the same instance.
    """
    n = int(rng.integers(5, 12))
    tau = np.cumprod(np.concatenate([
        [rng.uniform(0.5, 2.0)], rng.uniform(0.25, 0.6, size=n - 1)]))
    alpha = float(rng.uniform(0.3, 2.0))

    if kind in ("sup-sum", "sum-sum", "sum-sup"):
        a = rng.uniform(0.0, 3.0, size=n)
        a[rng.random(n) < 0.2] = 0.0
        if a.max() == 0.0:
            a[0] = 1.0
        return lemma_pair(kind, tau=tau, a=a, alpha=alpha)

    if kind in ("dec-sup-sum", "dec-sum-sum", "dec-sum-sup"):
        xs = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 1.0, size=n))])
        # the sup kind compares essential suprema, so g must stay bounded;
        # the integral kinds tolerate an integrable singularity at 0
        g_lo = 0.0 if kind == "dec-sum-sup" else -0.5
        g = PowerLaw(float(rng.uniform(0.5, 2.0)), float(rng.uniform(g_lo, 1.5)),
                     0.0, Interval(0.0, float(xs[-1])))
        return lemma_pair(kind, tau=tau, g=g, xs=xs, alpha=alpha)

    if kind in ("3-sup", "3-sum"):
        xs = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 1.0, size=n))])
        g = PowerLaw(float(rng.uniform(0.5, 2.0)), float(rng.uniform(-0.5, 1.5)),
                     0.0, Interval(0.0, float(xs[-1])))
        sigma = np.cumsum(rng.uniform(0.05, 1.0, size=n))
        return lemma_pair(kind, tau=tau, g=g, xs=xs, sigma=sigma, alpha=alpha)

    # int-equiv / sup-equiv run along an actual discretizing sequence
    iv = Interval(0.0, 1.0)
    w = PowerLaw(float(rng.uniform(0.5, 2.0)), float(rng.uniform(-0.5, 1.5)),
                 0.0, iv)
    ds = build_discretizing_sequence(w, iv, k_max=trunc_depth)
    c0, c1 = float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.0, 2.0))
    gam = float(rng.uniform(0.5, 2.0))

    def h(t):
        t = np.asarray(t, dtype=float)
        return c0 + c1 * t**gam

    return lemma_pair(kind, ds=ds, h=h, w=w, alpha=alpha)


# -- campaign drivers ----------------------------------------------------------


def _apply_seed_env(configs: list[ExperimentConfig]) -> list[ExperimentConfig]:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return configs
    try:
        seed = int(env)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return [replace(cfg, seed=seed) for cfg in configs]


def run_campaign(configs: list[ExperimentConfig], *, fail_fast: bool = False,
                 jobs: int = 1) -> CampaignReport:
    configs = _apply_seed_env(configs)
    results: list[ExperimentResult] = []
    aborted = False
    if jobs > 1 and len(configs) > 1 and not fail_fast:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_experiment, configs))
    else:
        for cfg in configs:
            res = run_experiment(cfg)
            results.append(res)
            if fail_fast and not res.passed:
                aborted = len(results) < len(configs)
                break
    return CampaignReport(results=results, aborted=aborted)


def write_report(report: CampaignReport, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    txt_path = os.path.join(out_dir, "summary.txt")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(report.to_csv())
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(report.summary())
    return csv_path, txt_path


def run(config_path: str, *, out_dir: str = ".", fail_fast: bool = False,
        jobs: int = 1) -> int:
    """Run a campaign file; returns the process exit code."""
    configs = load_config(config_path)
    report = run_campaign(configs, fail_fast=fail_fast, jobs=jobs)
    write_report(report, out_dir)
    return 0 if report.passed else 1


def sequence_csv(weight_text: str, interval: Interval, *, k_max: int = 16,
                 k_min: int | None = None) -> str:
    """CSV export of a discretizing sequence: one row per (index, x_k, W*(x_k))."""
    weight = unit_weight(interval) if weight_text.strip() == "unit" \
        else parse_weight(weight_text, interval)
    ds = build_discretizing_sequence(weight, interval, k_max=k_max,
                                     k_min=k_min)
    out = io.StringIO()
    out.write(f"# hardylab sequence schema v{SCHEMA_VERSION}\n")
    out.write("index,x_k,wstar\n")
    for k, x, mass in zip(ds.indices, ds.points, ds.wstar_values):
        out.write(f"{int(k)},{_fmt(x)},{_fmt(mass)}\n")
    return out.getvalue()


_SWEEPABLE = {"p": float, "q": float, "r": float, "grid_size": int,
              "order": int, "search_budget": int, "trunc_depth": int,
              "seed": int, "n_checks": int, "scale_u": float,
              "scale_v": float, "scale_w": float}


def sweep_campaign(configs: list[ExperimentConfig], param: str,
                   values: list[float], *, jobs: int = 1) -> CampaignReport:
    if param not in _SWEEPABLE:
        raise ConfigError(f"unknown sweep parameter {param!r} "
                          f"(expected one of {', '.join(sorted(_SWEEPABLE))})")
    kind = _SWEEPABLE[param]
    swept = []
    for cfg in configs:
        for val in values:
            swept.append(replace(cfg, sweep_param=param,
                                 sweep_value=str(kind(val)),
                                 **{param: kind(val)}))
    return run_campaign(swept, jobs=jobs)


def sweep(config_path: str, param: str, values: list[float], *,
          out_dir: str = ".", jobs: int = 1) -> int:
    """Sweep one numeric parameter across a campaign; returns exit code."""
    configs = load_config(config_path)
    report = sweep_campaign(configs, param, values, jobs=jobs)
    write_report(report, out_dir)
    return 0 if report.passed else 1
