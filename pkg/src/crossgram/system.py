"""Linear time-invariant state-space systems and their fixed-step simulation.

Systems are ``x' = A x + B u``, ``y = C x`` (no feed-through).  Time
integration is classical RK4 with the input held constant over each grid
step.  Each grid step may be split into ``substeps`` equal RK4 sub-steps;
this leaves the sample grid untouched but keeps stiff benchmark systems
inside the RK4 stability region (see :func:`rk4_substeps`).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, ResonanceError, ShapeError
from .matlib import format_float


@dataclass(frozen=True)
class LtiSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        C = np.asarray(self.C, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if C.ndim == 1:
            C = C[None, :]
        if A.shape[0] != A.shape[1]:
            raise ShapeError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise ShapeError(f"B has {B.shape[0]} rows, expected {A.shape[0]}")
        if C.shape[1] != A.shape[0]:
            raise ShapeError(f"C has {C.shape[1]} columns, expected {A.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def N(self):
        return self.A.shape[0]

    @property
    def M(self):
        return self.B.shape[1]

    @property
    def Q(self):
        return self.C.shape[0]

    def is_square(self):
        return self.M == self.Q

    def is_dissipative(self):
        """True if the symmetric part of ``A`` is negative definite."""
        return bool(np.max(np.linalg.eigvalsh(0.5 * (self.A + self.A.T))) < 0.0)

    def is_state_space_symmetric(self, rtol=1e-12):
        scale = max(np.linalg.norm(self.A), 1.0)
        return (np.linalg.norm(self.A - self.A.T) <= rtol * scale
                and self.C.shape == self.B.T.shape
                and np.linalg.norm(self.C - self.B.T) <= rtol * max(np.linalg.norm(self.B), 1.0))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_k = k * step`` for ``k = 0 .. count``."""

    step: float
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0):
            raise ValueError("time step must be positive and finite")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("step count must be a positive integer")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def from_horizon(cls, horizon, step):
        return cls(step, int(round(horizon / step)))

    @property
    def horizon(self):
        return self.step * self.count

    @property
    def times(self):
        return self.step * np.arange(self.count + 1)

    def weights(self, quadrature="rectangle"):
        """Quadrature weights over the ``count + 1`` samples."""
        w = np.full(self.count + 1, self.step)
        if quadrature == "rectangle":
            w[-1] = 0.0  # left endpoint rule
        elif quadrature == "trapezoid":
            w[0] = w[-1] = 0.5 * self.step
        else:
            raise ValueError(f"unknown quadrature {quadrature!r}")
        return w


@dataclass(frozen=True)
class Trajectory:
    """Samples at ``grid.times``; ``samples`` has shape ``(count + 1, dim)``."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if s.shape[0] != self.grid.count + 1:
            raise ShapeError(f"expected {self.grid.count + 1} samples, got {s.shape[0]}")
        object.__setattr__(self, "samples", s)

    @property
    def dim(self):
        return self.samples.shape[1]

    def mean(self):
        return self.samples.mean(axis=0)

    def to_csv(self, path):
        t = self.grid.times
        with open(path, "w") as fh:
            for tk, row in zip(t, self.samples):
                fh.write(",".join(format_float(v) for v in (tk, *row)) + "\n")

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        t = data[:, 0]
        step = t[1] - t[0] if len(t) > 1 else 1.0
        return cls(TimeGrid(step, len(t) - 1), data[:, 1:])


def rk4_substeps(A, step, limit=1.0):
    """Smallest sub-step count with ``(step / m) * ||A||_2 <= limit``.

    ``limit=1`` keeps every mode of a normal matrix well inside the RK4
    stability interval (about 2.785 on the negative real axis) with
    amplification error below 2 %.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 1
    rho = np.linalg.norm(A, 2)
    return max(1, int(np.ceil(step * rho / limit)))


def _propagate(A, X, BU, h, substeps):
    """Advance one grid step from states X (columns) under constant forcing BU."""
    hs = h / substeps
    for _ in range(substeps):
        k1 = A @ X + BU
        k2 = A @ (X + 0.5 * hs * k1) + BU
        k3 = A @ (X + 0.5 * hs * k2) + BU
        k4 = A @ (X + hs * k3) + BU
        X = X + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return X


def simulate_batch(A, X0, grid, forcing=None, substeps=1, observe=None):
    """RK4 integration of several independent initial states at once.

    Parameters
    ----------
    A : (N, N) array
    X0 : (N, P) array
        One initial state per column.
    grid : TimeGrid
    forcing : (count, N, P) array or None
        ``B u`` held over each step.
    substeps : int
    observe : callable or None
        Applied to the state block at every sample; its results are stacked
        along a new first axis.  Default records the full state.

    Returns
    -------
    (count + 1, ...) array of observed samples.
    """
    X = np.array(X0, dtype=float)
    observe = observe or (lambda Z: Z.copy())
    out = [observe(X)]
    zero = np.zeros_like(X)
    for k in range(grid.count):
        BU = zero if forcing is None else forcing[k]
        with np.errstate(over="ignore", invalid="ignore"):
            X = _propagate(A, X, BU, grid.step, substeps)
        if not np.all(np.isfinite(X)):
            raise DivergenceError(
                f"non-finite state at step {k + 1} (t={(k + 1) * grid.step:g}); "
                "reduce the step or raise the RK4 sub-step count", step=k + 1)
        out.append(observe(X))
    return np.stack(out)


def _input_samples(u, grid, M):
    if u is None:
        return None
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape[1] != M or u.shape[0] < grid.count:
        raise ShapeError(f"input must have shape ({grid.count}, {M}), got {u.shape}")
    return u[:grid.count]


def simulate(sys, x0, u, grid, substeps=1):
    """Simulate ``sys`` from ``x0`` under sample-and-hold input ``u``.

    ``u`` has one row per grid step (row ``k`` is applied on
    ``[t_k, t_{k+1})``); ``None`` means zero input.  Returns the state and
    output trajectories.
    """
    x0 = np.zeros(sys.N) if x0 is None else np.asarray(x0, dtype=float).reshape(sys.N)
    us = _input_samples(u, grid, sys.M)
    forcing = None if us is None else (us @ sys.B.T)[:, :, None]
    X = simulate_batch(sys.A, x0[:, None], grid, forcing, substeps)[:, :, 0]
    state = Trajectory(grid, X)
    output = Trajectory(grid, X @ sys.C.T)
    return state, output


def impulse_state_response(sys, direction, amplitude, grid, substeps=1):
    """State response to ``amplitude * direction * delta(t)``.

    For a linear system the impulse is equivalent to the initial state
    ``amplitude * B @ direction`` with zero input.
    """
    direction = np.asarray(direction, dtype=float).reshape(sys.M)
    x0 = amplitude * (sys.B @ direction)
    return simulate(sys, x0, None, grid, substeps)[0]


def adjoint(sys):
    return LtiSystem(sys.A.T.copy(), sys.C.T.copy(), sys.B.T.copy())


def transfer_function(sys, s):
    """``C (sI - A)^{-1} B`` at complex frequency ``s``."""
    n = sys.N
    K = s * np.eye(n, dtype=complex) - sys.A
    try:
        X = np.linalg.solve(K, sys.B.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise ResonanceError(f"s={s} is an eigenvalue of A") from exc
    if not np.all(np.isfinite(X)):
        raise ResonanceError(f"s={s} is an eigenvalue of A")
    return sys.C @ X
