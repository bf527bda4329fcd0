"""Cross Gramian computation: matrix equation and trajectory-based variants.

Three routes produce the cross Gramian ``W_X`` of a square system:

``sylvester``
    Solve ``A W + W A = -B C``.
``empirical-linear``
    Quadrature of ``x(t) z(t)^T`` over primal and adjoint impulse responses.
``empirical``
    Quadrature of mean-centered products of impulse-driven state
    trajectories with initial-state-driven output trajectories; needs no
    adjoint and no access to ``A`` beyond simulation.

Controllability/observability Gramians and Hankel singular values are
provided for cross-checks.
"""

import json
import time
from dataclasses import dataclass

import numpy as np

from . import matlib
from .errors import ConfigError, ShapeError
from .system import adjoint, impulse_state_response, simulate_batch

METHODS = ("sylvester", "empirical-linear", "empirical")


@dataclass(frozen=True)
class GramianResult:
    W: np.ndarray
    method: str
    residual: float
    wall_seconds: float

    @property
    def N(self):
        return self.W.shape[0]

    def save(self, stem):
        """Write ``<stem>.csv`` and the ``<stem>.json`` sidecar."""
        matlib.write_matrix_csv(f"{stem}.csv", self.W)
        meta = {"method": self.method, "residual": self.residual,
                "wall_seconds": self.wall_seconds, "N": self.N}
        with open(f"{stem}.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, stem):
        W = matlib.read_matrix_csv(f"{stem}.csv")
        with open(f"{stem}.json") as fh:
            meta = json.load(fh)
        return cls(W, meta["method"], meta["residual"], meta["wall_seconds"])


@dataclass(frozen=True)
class PerturbationSets:
    input_scales: tuple = (1.0,)
    state_scales: tuple = (1.0,)

    def __post_init__(self):
        ci = tuple(float(c) for c in self.input_scales)
        di = tuple(float(d) for d in self.state_scales)
        if not ci or not di:
            raise ConfigError("perturbation sets must be nonempty")
        if any(c == 0.0 for c in ci + di):
            raise ConfigError("perturbation scales must be nonzero")
        object.__setattr__(self, "input_scales", ci)
        object.__setattr__(self, "state_scales", di)


def _require_square(sys):
    if not sys.is_square():
        raise ShapeError(f"cross Gramian needs M == Q, got M={sys.M}, Q={sys.Q}")


def _is_symmetric(A, rtol=1e-8):
    return np.linalg.norm(A - A.T) <= rtol * np.linalg.norm(A)


def cross_gramian_sylvester(sys):
    """Cross Gramian as the solution of ``A W + W A = -B C``.

    Symmetric ``A`` goes through the eigendecomposition solver (declared
    stable, so round-off-level eigenvalues are tolerated); anything else
    through the matrix sign-function iteration.
    """
    _require_square(sys)
    t0 = time.perf_counter()
    rhs = -sys.B @ sys.C
    if _is_symmetric(sys.A):
        # state-space symmetric: rhs = -B B^T, pass the factor to keep W PSD
        factor = sys.B if np.array_equal(sys.C, sys.B.T) else None
        W = matlib.solve_sylvester_symmetric(sys.A, rhs, stable=True, factor=factor)
    else:
        W = matlib.solve_sylvester_general(sys.A, rhs)
    elapsed = time.perf_counter() - t0
    res = matlib.sylvester_residual(sys.A, W, rhs)
    return GramianResult(W, "sylvester", res, elapsed)


def _impulse_block(sys, grid, substeps):
    # (count + 1, N, M): one impulse state response per input column
    cols = [impulse_state_response(sys, e, 1.0, grid, substeps).samples
            for e in np.eye(sys.M)]
    return np.stack(cols, axis=2)


def empirical_linear_cross_gramian(sys, grid, substeps=1, quadrature="rectangle"):
    """Quadrature of ``x(t) z(t)^T`` with ``x = e^{At} B`` and ``z = e^{A^T t} C^T``.

    Both factors are simulated impulse responses (primal and adjoint
    system).  The default rule is the left-endpoint rectangle rule on the
    grid, truncated at the horizon.
    """
    _require_square(sys)
    t0 = time.perf_counter()
    X = _impulse_block(sys, grid, substeps)
    Z = _impulse_block(adjoint(sys), grid, substeps)
    w = grid.weights(quadrature)
    N = sys.N
    Xw = (X * w[:, None, None]).transpose(0, 2, 1).reshape(-1, N)
    Zr = Z.transpose(0, 2, 1).reshape(-1, N)
    W = Xw.T @ Zr
    return GramianResult(W, "empirical-linear", grid.step, time.perf_counter() - t0)


CENTERINGS = ("mean", "none")


def empirical_cross_gramian(sys, grid, perturb=None, substeps=1,
                            quadrature="rectangle", block=256, centering="mean"):
    """Empirical cross Gramian from perturbed trajectories.

    For every input scale ``c_k`` and input ``m`` the state response to the
    impulse ``c_k e_m delta(t)`` is simulated; for every state scale ``d_l``
    and state ``j`` the output response to the initial state ``d_l e_j``.
    All trajectories are centered about their temporal mean and

        W_ij = 1/(K L) sum_{k,l,m} 1/(c_k d_l) int (x_i^{km} - mean)(y_m^{lj} - mean) dt.

    The initial-state runs are done ``block`` columns at a time and only
    their outputs are kept.  ``centering="none"`` skips the mean removal
    (for comparison only; the definition above centers).
    """
    _require_square(sys)
    if centering not in CENTERINGS:
        raise ConfigError(f"unknown centering {centering!r}; choose from {CENTERINGS}")
    center = centering == "mean"
    perturb = perturb or PerturbationSets()
    t0 = time.perf_counter()
    N, M = sys.N, sys.M
    w = grid.weights(quadrature)
    C = sys.C
    W = np.zeros((N, N))

    centered_states = []
    for c in perturb.input_scales:
        X = c * _impulse_block(sys, grid, substeps)
        if center:
            X = X - X.mean(axis=0)
        # rows (t, m), columns i; weighted and pre-scaled by 1/c
        centered_states.append(((X * w[:, None, None]) / c).transpose(0, 2, 1).reshape(-1, N))

    for d in perturb.state_scales:
        for start in range(0, N, block):
            stop = min(start + block, N)
            X0 = np.zeros((N, stop - start))
            X0[np.arange(start, stop), np.arange(stop - start)] = d
            Y = simulate_batch(sys.A, X0, grid, substeps=substeps, observe=lambda X: C @ X)
            if center:
                Y = Y - Y.mean(axis=0)
            Y = Y.reshape(-1, stop - start)  # rows (t, m)
            for Xs in centered_states:
                W[:, start:stop] += (Xs.T @ Y) / d
    W /= len(perturb.input_scales) * len(perturb.state_scales)
    return GramianResult(W, "empirical", grid.step, time.perf_counter() - t0)


def controllability_gramian(sys):
    """Solve ``A W + W A^T = -B B^T``."""
    rhs = -sys.B @ sys.B.T
    if _is_symmetric(sys.A):
        return matlib.solve_sylvester_symmetric(sys.A, rhs, stable=True, factor=sys.B)
    return matlib.solve_lyapunov(sys.A, rhs)


def observability_gramian(sys):
    """Solve ``A^T W + W A = -C^T C``."""
    rhs = -sys.C.T @ sys.C
    if _is_symmetric(sys.A):
        return matlib.solve_sylvester_symmetric(sys.A, rhs, stable=True, factor=sys.C.T)
    return matlib.solve_lyapunov(sys.A.T, rhs)


def _psd_factor(W):
    spec = matlib.symmetric_eig(0.5 * (W + W.T))
    return spec.vectors * np.sqrt(np.clip(spec.values, 0.0, None))


def hankel_singular_values(sys):
    """Square roots of the eigenvalues of ``W_C W_O``, descending.

    Computed as the singular values of ``L_O^T L_C`` where ``W = L L^T``;
    this equals ``sqrt(lambda(W_C W_O))`` with negative round-off clamped,
    but keeps small values accurate.
    """
    Lc = _psd_factor(controllability_gramian(sys))
    Lo = _psd_factor(observability_gramian(sys))
    return matlib.svd(Lo.T @ Lc)[1]


def compute(method, sys, grid=None, perturb=None, substeps=1, quadrature="rectangle",
            centering="mean"):
    """Dispatch on a method tag from :data:`METHODS`."""
    if method == "sylvester":
        return cross_gramian_sylvester(sys)
    if method == "empirical-linear":
        return empirical_linear_cross_gramian(sys, grid, substeps, quadrature)
    if method == "empirical":
        return empirical_cross_gramian(sys, grid, perturb, substeps, quadrature,
                                       centering=centering)
    raise ConfigError(f"unknown Gramian method {method!r}")
