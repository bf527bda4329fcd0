"""Dense real linear-algebra kernels.

Factorizations come with fixed ordering and sign conventions so that every
downstream result is a pure function of its input:

* eigenvalues are ordered by descending absolute value, ties broken by
  descending signed value and then by original index;
* singular values are ordered descending (stable with respect to index);
* eigen/singular vector signs are fixed by making the entry of largest
  magnitude in each (left) vector positive;
* QR factors have a non-negative ``R`` diagonal.

The default backends are LAPACK (through numpy).  Cyclic Jacobi kernels are
available through ``method="jacobi"``; they are slower but dependency-free
and serve as an independent cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ConvergenceError, DegenerateInputError, NotSymmetricError,
                     ShapeError, SingularEquationError)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Spectrum:
    """Eigen- or singular values with their vectors (as columns)."""

    values: np.ndarray
    vectors: np.ndarray


def _square(G, name="matrix"):
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {G.shape}")
    return G


def _fix_signs(vectors):
    """Flip columns so that the largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors, np.ones(vectors.shape[1])
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs, signs


def eig_order(values):
    """Permutation sorting ``values`` by the package-wide eigenvalue order."""
    values = np.asarray(values, dtype=float)
    idx = np.arange(len(values))
    # lexsort: last key is primary
    return np.lexsort((idx, -values, -np.abs(values)))


# --------------------------------------------------------------------------
# QR


def qr_orthonormal(G):
    """Orthogonal factor of ``G = Q R`` with ``diag(R) >= 0``.

    Raises
    ------
    DegenerateInputError
        If ``G`` is numerically rank deficient.
    """
    G = _square(G)
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    scale = np.linalg.norm(G)
    if scale == 0.0 or np.min(np.abs(d)) <= 1e-12 * scale:
        raise DegenerateInputError("QR input is rank deficient")
    s = np.where(d < 0, -1.0, 1.0)
    return Q * s


# --------------------------------------------------------------------------
# symmetric eigenvalue decomposition


def _jacobi_eigh(S, tol=1e-13, max_sweeps=30):
    a = np.array(S, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    thresh = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= thresh:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
    if off <= thresh:
        return np.diag(a).copy(), v
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def symmetric_eig(S, method="lapack"):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    S
        Square matrix, symmetric up to ``1e-8`` relative (Frobenius).  It is
        symmetrized as ``(S + S.T) / 2`` before factoring.
    method
        ``"lapack"`` (default) or ``"jacobi"`` (cyclic Jacobi rotations).

    Returns
    -------
    Spectrum
        Values ordered by descending ``|lambda|``; orthonormal vectors.
    """
    S = _square(S)
    nrm = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > 1e-8 * nrm:
        raise NotSymmetricError("matrix is not symmetric; use the SVD path")
    S = 0.5 * (S + S.T)
    if method == "lapack":
        w, V = np.linalg.eigh(S)
    elif method == "jacobi":
        w, V = _jacobi_eigh(S)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = eig_order(w)
    V, _ = _fix_signs(V[:, order])
    return Spectrum(w[order], V)


# --------------------------------------------------------------------------
# singular value decomposition


def _jacobi_svd(G, tol=1e-15, max_sweeps=60):
    # one-sided (Hestenes) Jacobi on the columns of G, m >= n
    u = np.array(G, dtype=float)
    m, n = u.shape
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = u[:, i] @ u[:, i]
                beta = u[:, j] @ u[:, j]
                gamma = u[:, i] @ u[:, j]
                if gamma == 0.0 or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(zeta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
                vi = v[:, i].copy()
                v[:, i] = c * vi - s * v[:, j]
                v[:, j] = s * vi + c * v[:, j]
        if not rotated:
            break
    else:
        raise ConvergenceError("one-sided Jacobi SVD did not converge")
    sigma = np.linalg.norm(u, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    u = u[:, order]
    v = v[:, order]
    cutoff = max(m, n) * _EPS * (sigma[0] if n else 0.0)
    good = sigma > cutoff
    U = np.zeros((m, n))
    U[:, good] = u[:, good] / sigma[good]
    if not np.all(good):
        k = int(np.sum(good))
        # complete to an orthonormal set
        basis = np.hstack([U[:, :k], np.eye(m)])
        q, _ = np.linalg.qr(basis)
        U[:, k:] = q[:, k:n]
    return U, sigma, v.T


def svd(G, method="lapack"):
    """Thin SVD in the ``G = U @ diag(sigma) @ V`` convention.

    ``V`` is returned with the right singular vectors as *rows*, i.e. it is
    already "transposed": ``U`` is m-by-r, ``V`` is r-by-n, r = min(m, n).
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise ShapeError("svd expects a 2-D matrix")
    if method == "lapack":
        U, s, V = np.linalg.svd(G, full_matrices=False)
    elif method == "jacobi":
        if G.shape[0] >= G.shape[1]:
            U, s, V = _jacobi_svd(G)
        else:
            Ut, s, Vt = _jacobi_svd(G.T)
            U, V = Vt.T, Ut.T
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(-s, kind="stable")
    U, s, V = U[:, order], s[order], V[order, :]
    U, signs = _fix_signs(U)
    V = V * signs[:, None]
    return U, s, V


# --------------------------------------------------------------------------
# Sylvester equations


def solve_sylvester_symmetric(F, rhs, rtol=1e-12, stable=False, factor=None):
    """Solve ``F X + X F = rhs`` for symmetric ``F``.

    The coefficient is diagonalized, ``F = V diag(f) V^T``, the right-hand
    side transformed, divided elementwise by ``f_i + f_j`` and transformed
    back.

    Parameters
    ----------
    F
        Symmetric N-by-N coefficient.
    rhs
        N-by-N right-hand side.
    rtol
        Pairs with ``|f_i + f_j| <= rtol * ||F||_F`` are treated as resonant.
    stable
        Declare ``F`` negative (semi-)definite.  Eigenvalues that are
        indistinguishable from zero at working precision (within
        ``N * eps * ||F||_2``) are then pinned to minus that bound instead of
        raising; genuinely positive eigenvalues still raise.  Needed for
        benchmark systems whose slowest modes sit at round-off level.
    factor
        Optional N-by-k matrix ``G`` with ``rhs = -G G^T``.  The transformed
        right-hand side is then formed as ``-(V^T G)(V^T G)^T``, which keeps
        its positive semi-definite structure exactly; with ``stable=True``
        the solution is positive semi-definite up to round-off even when
        ``f_i + f_j`` is tiny.

    Raises
    ------
    SingularEquationError
        On a resonant eigenvalue pair.
    """
    F = _square(F, "coefficient")
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != F.shape:
        raise ShapeError(f"rhs shape {rhs.shape} does not match {F.shape}")
    spec = symmetric_eig(F)
    f, V = spec.values, spec.vectors
    n = len(f)
    if stable and n:
        floor = n * _EPS * np.max(np.abs(f))
        if np.max(f) > floor:
            raise SingularEquationError(
                f"coefficient has a positive eigenvalue {np.max(f):.3e}; not stable")
        f = np.minimum(f, -floor) if floor > 0 else f
    denom = f[:, None] + f[None, :]
    limit = rtol * np.linalg.norm(F) if not stable else 0.0
    if np.any(np.abs(denom) <= limit):
        raise SingularEquationError("resonant eigenvalue pair f_i + f_j ~ 0")
    if factor is not None:
        G = np.asarray(factor, dtype=float).reshape(n, -1)
        Gt = V.T @ G
        Rt = -(Gt @ Gt.T)
    else:
        Rt = V.T @ rhs @ V
    symmetric = np.linalg.norm(rhs - rhs.T) <= 1e-14 * np.linalg.norm(rhs)
    if symmetric:
        # the exact solution is symmetric; keep round-off from breaking that,
        # since small f_i + f_j would amplify it
        Rt = 0.5 * (Rt + Rt.T)
    X = V @ (Rt / denom) @ V.T
    return 0.5 * (X + X.T) if symmetric else X


def _sign_sylvester(A, Bm, rhs, tol, max_iter):
    # Newton sign iteration on [[A, -rhs], [0, -Bm]], kept in block form
    # [[P, E], [0, R]]; converges to [[-I, 2W], [0, I]] with A W + W Bm = rhs.
    P = A.copy()
    R = -Bm.copy()
    E = -rhs.copy()
    for _ in range(max_iter):
        try:
            Pinv = np.linalg.inv(P)
            Rinv = np.linalg.inv(R)
        except np.linalg.LinAlgError as exc:
            raise SingularEquationError("singular sign-function iterate") from exc
        if not (np.all(np.isfinite(Pinv)) and np.all(np.isfinite(Rinv))):
            raise SingularEquationError("singular sign-function iterate")
        P_new = 0.5 * (P + Pinv)
        R_new = 0.5 * (R + Rinv)
        E_new = 0.5 * (E - Pinv @ E @ Rinv)
        step = np.sqrt(np.linalg.norm(P_new - P) ** 2 + np.linalg.norm(R_new - R) ** 2
                       + np.linalg.norm(E_new - E) ** 2)
        size = np.sqrt(np.linalg.norm(P) ** 2 + np.linalg.norm(R) ** 2 + np.linalg.norm(E) ** 2)
        P, R, E = P_new, R_new, E_new
        if step <= tol * size:
            break
    else:
        raise ConvergenceError(
            f"sign iteration did not converge in {max_iter} iterations (is A stable?)")
    I = np.eye(A.shape[0])
    if (np.linalg.norm(P + I) > 1e-6 * np.sqrt(len(I))
            or np.linalg.norm(R - np.eye(R.shape[0])) > 1e-6 * np.sqrt(R.shape[0])):
        raise ConvergenceError("sign iteration converged to a non-stable sign; A is not stable")
    return 0.5 * E


def solve_sylvester_general(A, rhs, tol=1e-12, max_iter=100):
    """Solve ``A W + W A = rhs`` for asymptotically stable ``A``.

    Uses the Newton iteration ``Z <- (Z + Z^{-1}) / 2`` for the matrix sign
    function of ``[[A, -rhs], [0, -A]]``.  The iterate keeps its block
    upper-triangular structure, so only the diagonal blocks are inverted; at
    convergence the sign is ``[[-I, 2 W], [0, I]]``.

    Raises
    ------
    ConvergenceError
        No convergence within ``max_iter`` iterations, or ``A`` not stable.
    SingularEquationError
        An iterate became singular.
    """
    A = _square(A)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != A.shape:
        raise ShapeError(f"rhs shape {rhs.shape} does not match {A.shape}")
    return _sign_sylvester(A, A, rhs, tol, max_iter)


def solve_lyapunov(A, rhs, tol=1e-12, max_iter=100):
    """Solve ``A W + W A^T = rhs`` for stable ``A`` (sign-function iteration)."""
    A = _square(A)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != A.shape:
        raise ShapeError(f"rhs shape {rhs.shape} does not match {A.shape}")
    return _sign_sylvester(A, A.T, rhs, tol, max_iter)


def sylvester_residual(A, W, rhs):
    """Frobenius norm of ``A W + W A - rhs``."""
    return float(np.linalg.norm(A @ W + W @ A - rhs))


# --------------------------------------------------------------------------
# CSV I/O


def format_float(x):
    return "%.17g" % x


def write_matrix_csv(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(format_float(x) for x in row) + "\n")


def read_matrix_csv(path):
    M = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{path}: non-finite entries")
    return M
