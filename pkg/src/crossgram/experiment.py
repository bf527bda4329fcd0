"""End-to-end comparison experiment: generate, compute Gramians, sweep orders.

The FOM is driven by one seeded Gaussian noise realization (one sample per
step and input, held over the step) from a zero initial state.  Every
Gramian variant is turned into a projection, and for each requested order
the ROM is simulated with the same input.  All files are written after the
computation has finished, so output bytes depend only on the configuration.
"""

import json
import logging
import math
import warnings
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import gramian, matlib, metrics
from .benchmark import BenchmarkSpec, GeneratedSystem, RandomStream, inverse_sylvester_procedure
from .errors import ConfigError, CrossGramError, DivergenceError
from .reduce import KINDS, projection, reduce_system, truncate
from .system import TimeGrid, rk4_substeps, simulate

log = logging.getLogger(__name__)

FIGURES = (("l1", "l1_rel"), ("l2", "l2_rel"), ("linf", "linf_rel"),
           ("h2", "h2_rel"), ("hinf", "hinf_rel"))


class StageError(CrossGramError):
    """A stage of the experiment failed; the original error is ``__cause__``."""

    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage


@contextmanager
def _stage(name):
    try:
        yield
    except StageError:
        raise
    except (CrossGramError, OSError) as exc:
        raise StageError(name, exc) from exc


def parse_orders(value):
    """Accept ``"1..100"``, ``"1,2,5"``, an int or a list of ints."""
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        value = value.strip()
        if ".." in value:
            lo, hi = value.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in value.split(",") if v.strip()]
    return [int(v) for v in value]


@dataclass
class ExperimentConfig:
    spec: BenchmarkSpec = field(default_factory=BenchmarkSpec)
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(0.01, 100))
    gramians: tuple = gramian.METHODS
    projection: str = "direct-truncation-left"
    orders: list = field(default_factory=lambda: list(range(1, 101)))
    perturb: gramian.PerturbationSets = field(default_factory=gramian.PerturbationSets)
    noise_seed: int = 1
    output_dir: str = "crossgram-out"
    substeps: int = 0  # 0: choose from the spectral norm of A
    quadrature: str = "rectangle"
    centering: str = "mean"

    def __post_init__(self):
        self.gramians = tuple(self.gramians)
        bad = [g for g in self.gramians if g not in gramian.METHODS]
        if bad or not self.gramians:
            raise ConfigError(f"unknown Gramian variant(s) {bad}; choose from {gramian.METHODS}")
        if self.projection not in KINDS:
            raise ConfigError(f"unknown projection {self.projection!r}; choose from {KINDS}")
        self.orders = parse_orders(self.orders)
        if not self.orders or min(self.orders) < 1:
            raise ConfigError("orders must be positive")
        if self.substeps < 0:
            raise ConfigError("substeps must be >= 0")
        if self.quadrature not in ("rectangle", "trapezoid"):
            raise ConfigError(f"unknown quadrature {self.quadrature!r}")
        if self.centering not in gramian.CENTERINGS:
            raise ConfigError(f"unknown centering {self.centering!r}")

    def to_dict(self):
        d = asdict(self)
        d["gramians"] = list(self.gramians)
        d["perturb"] = {"input_scales": list(self.perturb.input_scales),
                        "state_scales": list(self.perturb.state_scales)}
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            if "spec" in d:
                d["spec"] = BenchmarkSpec(**d["spec"])
            if "grid" in d:
                d["grid"] = TimeGrid(**d["grid"])
            if "perturb" in d:
                d["perturb"] = gramian.PerturbationSets(**d["perturb"])
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    system: GeneratedSystem
    substeps: int
    noise: np.ndarray
    fom_output: object
    gramians: dict
    projections: dict
    reports: dict


def _unstable(A_r):
    # symmetric-part eigenvalues above round-off level
    S = 0.5 * (A_r + A_r.T)
    ev = np.linalg.eigvalsh(S)
    tol = len(S) * np.finfo(float).eps * max(np.max(np.abs(ev)), 1.0)
    return bool(ev[-1] > tol)


def sweep(sys, proj, u, grid, orders, substeps, y, method=""):
    """Reduce, simulate and measure for each order; returns an ErrorReport."""
    ref = metrics.lebesgue_norms(y)
    w = proj.scores
    B_bal = proj.R @ sys.B
    C_bal = sys.C @ proj.S
    eye = np.eye(len(w))
    h2_ref = metrics.h2_approx(w, B_bal, C_bal, eye[:, :0], 0)
    hinf_ref = metrics.hinf_sss(w, 0)
    report = metrics.ErrorReport(method)
    for n in orders:
        if n > proj.n_max:
            continue
        R_n, S_n = truncate(proj, n)
        rom = reduce_system(sys, R_n, S_n, proj.kind)
        unstable = _unstable(rom.sys.A)
        try:
            _, y_r = simulate(rom.sys, None, u, grid, substeps)
            abs_err = metrics.lebesgue_errors(y, y_r)
        except DivergenceError:
            abs_err = (math.inf, math.inf, math.inf)
            unstable = True
        rel_err = [metrics.relative(e, r) for e, r in zip(abs_err, ref)]
        h2 = metrics.relative(metrics.h2_approx(w, B_bal, C_bal, eye[:, :n], n), h2_ref)
        hinf = metrics.relative(metrics.hinf_sss(w, n), hinf_ref)
        report.add(n, abs_err, rel_err, h2, hinf, unstable)
    return report


def run_experiment(cfg, system=None, write=True):
    """Run the full comparison; returns an :class:`ExperimentResult`."""
    with _stage("generate"):
        gen = system if system is not None else inverse_sylvester_procedure(cfg.spec)
    sys, grid = gen.sys, cfg.grid
    substeps = cfg.substeps or rk4_substeps(sys.A, grid.step)
    log.info("N=%d, %d RK4 sub-steps per grid step", sys.N, substeps)

    with _stage("input"):
        u = RandomStream(cfg.noise_seed).gaussian(grid.count * sys.M).reshape(grid.count, sys.M)
    with _stage("simulate FOM"):
        _, y = simulate(sys, None, u, grid, substeps)

    gramians, projections, reports = {}, {}, {}
    for method in cfg.gramians:
        with _stage(f"gramian {method}"):
            G = gramian.compute(method, sys, grid, cfg.perturb, substeps, cfg.quadrature,
                                cfg.centering)
            log.info("%s Gramian in %.2fs", method, G.wall_seconds)
        with _stage(f"projection {method}"):
            proj = projection(cfg.projection, G.W)
        with _stage(f"sweep {method}"):
            reports[method] = sweep(sys, proj, u, grid, cfg.orders, substeps, y, method)
        gramians[method] = G
        projections[method] = proj

    result = ExperimentResult(cfg, gen, substeps, u, y, gramians, projections, reports)
    if write:
        with _stage("write"):
            write_artifacts(result)
    return result


def write_artifacts(result):
    out = Path(result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.system.save(out / "system")
    cfg = result.config.to_dict()
    cfg["substeps_used"] = result.substeps
    with open(out / "config.json", "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
    matlib.write_matrix_csv(out / "input.csv", result.noise)
    result.fom_output.to_csv(out / "fom_output.csv")
    for method, G in result.gramians.items():
        G.save(out / f"gramian_{method}")
    for method, rep in result.reports.items():
        rep.to_csv(out / f"report_{method}.csv")
    emit_plot_data(result.reports, out)


def emit_plot_data(reports, out_dir, svg=True):
    """One whitespace-separated table per figure, plus optional SVG charts.

    Returns the list of written paths.
    """
    if not reports:
        warnings.warn("no reports given; nothing to plot")
        return []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    methods = list(reports)
    orders = sorted({n for r in reports.values() for n in r.orders})
    written = []
    for fig, column in FIGURES:
        table = {}
        for m in methods:
            rep = reports[m]
            table[m] = dict(zip(rep.orders, rep.column(column)))
        path = out / f"fig_{fig}.dat"
        with open(path, "w") as fh:
            fh.write("# n " + " ".join(methods) + "\n")
            for n in orders:
                vals = [table[m].get(n, float("nan")) for m in methods]
                fh.write(f"{n} " + " ".join(matlib.format_float(v) for v in vals) + "\n")
        written.append(path)
        if svg:
            spath = out / f"fig_{fig}.svg"
            spath.write_text(svg_chart(orders, {m: [table[m].get(n, float("nan")) for n in orders]
                                                for m in methods},
                                       title=f"relative {fig} error"))
            written.append(spath)
    return written


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def svg_chart(x, series, title="", ymin=1e-16, ymax=1.0, width=640, height=400):
    """Line chart with a log10 y-axis clamped to ``[ymin, ymax]``."""
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    lo, hi = math.log10(ymin), math.log10(ymax)
    x0, x1 = (min(x), max(x)) if x else (0, 1)
    span = (x1 - x0) or 1

    def px(v):
        return left + pw * (v - x0) / span

    def py(v):
        if not np.isfinite(v):
            v = ymax
        lv = math.log10(min(max(v, ymin), ymax))
        return top + ph * (hi - lv) / (hi - lo)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'font-family="sans-serif" font-size="11">',
             f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
             f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{title}</text>']
    for d in range(int(lo), int(hi) + 1):
        yy = py(10.0 ** d)
        parts.append(f'<line x1="{left}" y1="{yy:.1f}" x2="{left + pw}" y2="{yy:.1f}" '
                     f'stroke="#ddd"/>')
        parts.append(f'<text x="{left - 5}" y="{yy + 4:.1f}" text-anchor="end">1e{d}</text>')
    for v in np.linspace(x0, x1, 6):
        parts.append(f'<text x="{px(v):.1f}" y="{top + ph + 16}" text-anchor="middle">'
                     f'{v:.0f}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">'
                 'reduced order n</text>')
    for k, (name, ys) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{left + pw - 5}" y="{top + 15 + 14 * k}" text-anchor="end" '
                     f'fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def with_overrides(cfg, **kw):
    """Copy of ``cfg`` with non-None keyword overrides applied."""
    spec_keys = {"N", "M", "a", "b", "seed"}
    spec_kw = {k: v for k, v in kw.items() if k in spec_keys and v is not None}
    rest = {k: v for k, v in kw.items() if k not in spec_keys and v is not None}
    try:
        if spec_kw:
            rest["spec"] = replace(cfg.spec, **spec_kw)
        return replace(cfg, **rest)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
