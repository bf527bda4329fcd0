"""Random state-space-symmetric benchmark systems (inverse Sylvester procedure).

A positive diagonal cross Gramian and a random input matrix are sampled,
the system matrix is recovered from ``W A + A W = -B B^T`` in closed form,
and the realization is unbalanced by a random orthogonal transformation.

Random numbers
--------------
All draws come from :class:`RandomStream`:

* bit generator: PCG64 (PCG XSL-RR 128/64, LCG multiplier
  ``0x2360ED051FC65DA44385DF649FCCF645``), state and increment initialized
  from ``numpy.random.SeedSequence(seed)``;
* ``uniform01``: top 53 bits of a 64-bit output times ``2**-53`` (in [0, 1));
* ``gaussian``: Box-Muller on consecutive uniform pairs ``(u1, u2)``,
  ``r = sqrt(-2 log(1 - u1))``, emitting ``r cos(2 pi u2)`` then
  ``r sin(2 pi u2)``.

Draw order in the procedure: N uniforms (spectrum), N*M Gaussians (``B``,
row-major), N*N Gaussians (orthogonal factor, row-major).
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import matlib
from .errors import ConfigError
from .system import LtiSystem


class RandomStream:
    """Deterministic uniform / Gaussian stream for a 64-bit seed."""

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        self._bits = np.random.PCG64(np.random.SeedSequence(seed))
        self._spare = []

    def uniform01(self, size=None):
        raw = self._bits.random_raw(1 if size is None else size)
        u = (np.asarray(raw, dtype=np.uint64) >> np.uint64(11)).astype(float) * 2.0**-53
        return float(u[0]) if size is None else u

    def gaussian(self, size=None):
        n = 1 if size is None else int(size)
        out = list(self._spare[:n])
        self._spare = self._spare[n:]
        need = n - len(out)
        if need > 0:
            pairs = (need + 1) // 2
            u = self.uniform01(2 * pairs)
            r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
            theta = 2.0 * np.pi * u[1::2]
            z = np.empty(2 * pairs)
            z[0::2] = r * np.cos(theta)
            z[1::2] = r * np.sin(theta)
            out.extend(z[:need])
            self._spare = list(z[need:])
        return float(out[0]) if size is None else np.asarray(out, dtype=float)


def seeded_rng(seed):
    return RandomStream(seed)


@dataclass(frozen=True)
class BenchmarkSpec:
    N: int = 1000
    M: int = 1
    a: float = 0.1
    b: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 1 or self.M < 1:
            raise ConfigError("N and M must be positive")
        if not 0 < self.a < self.b:
            raise ConfigError("spectrum bounds must satisfy 0 < a < b")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class GeneratedSystem:
    sys: LtiSystem
    lambda_true: np.ndarray
    U: np.ndarray
    spec: BenchmarkSpec

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        matlib.write_matrix_csv(d / "A.csv", self.sys.A)
        matlib.write_matrix_csv(d / "B.csv", self.sys.B)
        matlib.write_matrix_csv(d / "C.csv", self.sys.C)
        matlib.write_matrix_csv(d / "lambda.csv", self.lambda_true[:, None])
        matlib.write_matrix_csv(d / "U.csv", self.U)
        with open(d / "spec.json", "w") as fh:
            json.dump(asdict(self.spec), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, directory):
        d = Path(directory)
        with open(d / "spec.json") as fh:
            spec = BenchmarkSpec(**json.load(fh))
        sys = LtiSystem(matlib.read_matrix_csv(d / "A.csv"),
                        matlib.read_matrix_csv(d / "B.csv"),
                        matlib.read_matrix_csv(d / "C.csv"))
        lam = matlib.read_matrix_csv(d / "lambda.csv")[:, 0]
        return cls(sys, lam, matlib.read_matrix_csv(d / "U.csv"), spec)


def inverse_sylvester_procedure(spec, unbalance=True, eigenvalues=None, input_matrix=None):
    """Generate a stable state-space-symmetric system with known cross Gramian.

    Parameters
    ----------
    spec : BenchmarkSpec
    unbalance : bool
        If False the orthogonal transformation is the identity and the
        returned realization is balanced (``W_X = diag(lambda)``).
    eigenvalues, input_matrix : array, optional
        Replace the sampled spectrum / input matrix (the corresponding draws
        are skipped).

    Returns
    -------
    GeneratedSystem
    """
    N, M = spec.N, spec.M
    rng = RandomStream(spec.seed)
    if eigenvalues is None:
        lam = spec.a * (spec.b / spec.a) ** rng.uniform01(N)
    else:
        lam = np.asarray(eigenvalues, dtype=float).reshape(N)
    if input_matrix is None:
        B = rng.gaussian(N * M).reshape(N, M)
    else:
        B = np.asarray(input_matrix, dtype=float).reshape(N, M)

    # W A + A W = -B B^T with W = diag(lam)
    A = -(B @ B.T) / (lam[:, None] + lam[None, :])

    if unbalance:
        U = matlib.qr_orthonormal(rng.gaussian(N * N).reshape(N, N))
        A = U.T @ A @ U
        A = 0.5 * (A + A.T)
        B = U.T @ B
    else:
        U = np.eye(N)
    return GeneratedSystem(LtiSystem(A, B, B.T.copy()), lam, U, spec)
