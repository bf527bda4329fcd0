"""Reduction error measures: time-domain Lebesgue norms and Hardy-norm proxies."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ResonanceError, ShapeError
from .matlib import format_float
from .system import transfer_function

REPORT_HEADER = "n,l1_rel,l2_rel,linf_rel,h2_rel,hinf_rel,unstable"


def _delta(y, y_r):
    if y.grid != y_r.grid or y.samples.shape != y_r.samples.shape:
        raise ShapeError("trajectories live on different grids or have different dimensions")
    return y.samples - y_r.samples


def lebesgue_norms(y):
    """(L1, L2, Linf) of a single trajectory on its grid."""
    h = y.grid.step
    s = y.samples[:-1]  # left-endpoint rule
    l1 = float(np.sum(np.abs(s)) * h)
    l2 = float(np.sqrt(np.sum(s * s) * h))
    linf = float(np.max(np.abs(s)))
    return l1, l2, linf


def lebesgue_errors(y, y_r):
    """Absolute (L1, L2, Linf) output errors by the rectangle rule.

    The integrals use the samples ``t_0 .. t_{S-1}`` with weight ``h`` and
    the sup is taken over the same samples, so that ``Linf <= L1 / h`` and
    ``L2**2 <= L1 * Linf`` hold exactly.
    """
    d = _delta(y, y_r)
    h = y.grid.step
    body = d[:-1]
    l1 = float(np.sum(np.abs(body)) * h)
    l2 = float(np.sqrt(np.sum(body * body) * h))
    linf = float(np.max(np.abs(body)))
    return l1, l2, linf


def hinf_sss(hsv, n):
    """Twice the truncated tail ``2 * sum(hsv[n:])``."""
    hsv = np.asarray(hsv, dtype=float)
    if not 0 <= n <= len(hsv):
        raise ValueError(f"order {n} outside 0..{len(hsv)}")
    return float(2.0 * np.sum(hsv[n:]))


def h2_approx(w_balanced, B_bal, C_bal, S_n, n):
    """Approximate H2 error ``sqrt(tr(C2 W22 B2))`` from a balanced realization.

    ``B2 = B - S_n S_n^T B`` and ``C2 = C - C S_n S_n^T``; the trace runs
    over the trailing ``N - n`` coordinates where ``W22 = diag(w[n:])``.
    Negative round-off is clamped before the square root.
    """
    w = np.asarray(w_balanced, dtype=float)
    B_bal = np.atleast_2d(B_bal)
    C_bal = np.atleast_2d(C_bal)
    N = len(w)
    S_n = np.asarray(S_n, dtype=float).reshape(N, -1) if n else np.zeros((N, 0))
    if B_bal.shape[0] != N or C_bal.shape[1] != N or S_n.shape[1] != n:
        raise ShapeError("h2_approx: inconsistent shapes")
    B2 = B_bal - S_n @ (S_n.T @ B_bal)
    C2 = C_bal - (C_bal @ S_n) @ S_n.T
    t = np.trace((C2[:, n:] * w[n:]) @ B2[n:, :])
    return float(np.sqrt(max(0.0, t)))


def hinf_sampled(sys, rom, omegas):
    """Largest singular value of ``G(iw) - G_r(iw)`` over the sampled ``omegas``.

    Frequencies at which either transfer function is singular are skipped
    (counted in a warning).
    """
    rsys = getattr(rom, "sys", rom)
    worst = 0.0
    skipped = 0
    for w in np.asarray(omegas, dtype=float):
        try:
            D = transfer_function(sys, 1j * w) - transfer_function(rsys, 1j * w)
        except ResonanceError:
            skipped += 1
            continue
        worst = max(worst, float(np.linalg.svd(D, compute_uv=False)[0]))
    if skipped:
        warnings.warn(f"hinf_sampled skipped {skipped} resonant frequencies")
    return worst


@dataclass
class ErrorReport:
    """Per-order relative errors for one Gramian variant."""

    method: str
    orders: list = field(default_factory=list)
    l1_abs: list = field(default_factory=list)
    l2_abs: list = field(default_factory=list)
    linf_abs: list = field(default_factory=list)
    l1_rel: list = field(default_factory=list)
    l2_rel: list = field(default_factory=list)
    linf_rel: list = field(default_factory=list)
    h2_rel: list = field(default_factory=list)
    hinf_rel: list = field(default_factory=list)
    unstable: list = field(default_factory=list)

    def add(self, n, abs_errors, rel_errors, h2_rel, hinf_rel, unstable):
        self.orders.append(int(n))
        for name, v in zip(("l1_abs", "l2_abs", "linf_abs"), abs_errors):
            getattr(self, name).append(float(v))
        for name, v in zip(("l1_rel", "l2_rel", "linf_rel"), rel_errors):
            getattr(self, name).append(float(v))
        self.h2_rel.append(float(h2_rel))
        self.hinf_rel.append(float(hinf_rel))
        self.unstable.append(bool(unstable))

    def column(self, name):
        return np.asarray(getattr(self, name), dtype=float)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(REPORT_HEADER + "\n")
            for i, n in enumerate(self.orders):
                vals = [self.l1_rel[i], self.l2_rel[i], self.linf_rel[i],
                        self.h2_rel[i], self.hinf_rel[i]]
                fh.write(",".join([str(n)] + [format_float(v) for v in vals]
                                  + [str(int(self.unstable[i]))]) + "\n")

    @classmethod
    def from_csv(cls, path, method=""):
        rep = cls(method)
        with open(path) as fh:
            header = fh.readline().strip()
            if header != REPORT_HEADER:
                raise ValueError(f"{path}: unexpected header {header!r}")
            for line in fh:
                f = line.strip().split(",")
                if len(f) != 7:
                    continue
                rep.orders.append(int(f[0]))
                rep.l1_rel.append(float(f[1]))
                rep.l2_rel.append(float(f[2]))
                rep.linf_rel.append(float(f[3]))
                rep.h2_rel.append(float(f[4]))
                rep.hinf_rel.append(float(f[5]))
                rep.unstable.append(f[6] == "1")
        return rep


def relative(abs_value, ref):
    """``abs_value / ref``, NaN when the reference norm vanishes."""
    return abs_value / ref if ref > 0 else float("nan")
