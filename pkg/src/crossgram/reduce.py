"""Projections derived from a cross Gramian, and projected reduced models."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matlib
from .errors import NotSymmetricError, ShapeError
from .system import LtiSystem

KINDS = ("evd-balancing", "svd-approx", "direct-truncation-left", "direct-truncation-right")


@dataclass(frozen=True)
class Projection:
    """Reducing ``R`` (rows) / reconstructing ``S`` (columns) pair, ranked by ``scores``."""

    R: np.ndarray
    S: np.ndarray
    scores: np.ndarray
    kind: str

    @property
    def n_max(self):
        return self.R.shape[0]

    @property
    def degenerate(self):
        return not np.any(self.scores > 0)


@dataclass(frozen=True)
class Rom:
    sys: LtiSystem
    order: int
    kind: str
    parent_N: int

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        matlib.write_matrix_csv(d / "A.csv", self.sys.A)
        matlib.write_matrix_csv(d / "B.csv", self.sys.B)
        matlib.write_matrix_csv(d / "C.csv", self.sys.C)
        with open(d / "rom.json", "w") as fh:
            json.dump({"order": self.order, "kind": self.kind, "parent_N": self.parent_N},
                      fh, indent=2, sort_keys=True)


def _matrix(W):
    return getattr(W, "W", W)


def balancing_projection_evd(W):
    """Balancing projection from the eigendecomposition of a symmetric ``W``.

    With ``W = V diag(lam) V^T`` this is ``S = V``, ``R = V^T``, ranked by
    ``|lam|``.
    """
    W = np.asarray(_matrix(W), dtype=float)
    if np.linalg.norm(W - W.T) > 1e-6 * np.linalg.norm(W):
        raise NotSymmetricError("EVD balancing needs a symmetric cross Gramian; "
                                "use approx_balancing_svd instead")
    spec = matlib.symmetric_eig(0.5 * (W + W.T))
    V = spec.vectors
    return Projection(V.T.copy(), V, np.abs(spec.values), "evd-balancing")


def approx_balancing_svd(W):
    """``W = U diag(sigma) V``: ``S = U``, ``R = V``.

    Only approximately balancing for non-symmetric systems; ``R S`` is the
    identity only if ``U`` and ``V^T`` span the same space.
    """
    U, s, V = matlib.svd(_matrix(W))
    return Projection(V, U, s, "svd-approx")


def direct_truncation(W, side="left"):
    """One-sided orthogonal (Galerkin) projection from the SVD of ``W``."""
    U, s, V = matlib.svd(_matrix(W))
    if side == "left":
        return Projection(U.T.copy(), U, s, "direct-truncation-left")
    if side == "right":
        return Projection(V, V.T.copy(), s, "direct-truncation-right")
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def projection(kind, W):
    if kind == "evd-balancing":
        return balancing_projection_evd(W)
    if kind == "svd-approx":
        return approx_balancing_svd(W)
    if kind == "direct-truncation-left":
        return direct_truncation(W, "left")
    if kind == "direct-truncation-right":
        return direct_truncation(W, "right")
    raise ValueError(f"unknown projection kind {kind!r}")


def davidson_scores(sys_balanced, scores_in):
    """``d_i = ||row_i(B)|| * ||col_i(C)|| * scores_in[i]`` (unsorted).

    For SISO systems this is ``|b_i c_i lam_i|``.
    """
    scores_in = np.asarray(scores_in, dtype=float)
    if scores_in.shape != (sys_balanced.N,):
        raise ShapeError(f"need {sys_balanced.N} scores, got {scores_in.shape}")
    b = np.linalg.norm(sys_balanced.B, axis=1)
    c = np.linalg.norm(sys_balanced.C, axis=0)
    return b * c * np.abs(scores_in)


def rank_by(p, values):
    """Reorder a projection by descending ``values`` (e.g. Davidson scores)."""
    order = np.argsort(-np.asarray(values), kind="stable")
    return Projection(p.R[order], p.S[:, order], np.asarray(values)[order], p.kind)


def truncate(p, n):
    if not 1 <= n <= p.n_max:
        raise ValueError(f"order {n} outside 1..{p.n_max}")
    return p.R[:n], p.S[:, :n]


def reduce_system(sys, R, S, kind="", parent_N=None):
    """Petrov-Galerkin reduced model ``(R A S, R B, C S)``."""
    R = np.atleast_2d(R)
    S = np.asarray(S)
    if S.ndim == 1:
        S = S[:, None]
    if R.shape[1] != sys.N or S.shape[0] != sys.N or R.shape[0] != S.shape[1]:
        raise ShapeError(f"projection shapes R{R.shape}, S{S.shape} incompatible with N={sys.N}")
    rsys = LtiSystem(R @ sys.A @ S, R @ sys.B, sys.C @ S)
    return Rom(rsys, R.shape[0], kind, parent_N or sys.N)
