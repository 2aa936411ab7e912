"""Dense complex linear algebra for small bipartite systems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The tensor
index convention is fixed for the whole package: the product basis vector
``|j>_A (x) |k>_B`` sits at row ``j * d_B + k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

HERMITIAN_TOL = 1e-9
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class DimensionError(ValueError):
    """Raised when an operand does not match the declared tensor structure."""


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteDims:
    """Local dimensions ``(d_A, d_B)`` of a bipartite Hilbert space."""

    d_a: int
    d_b: int

    def __post_init__(self):
        for name, d in (("d_a", self.d_a), ("d_b", self.d_b)):
            if int(d) != d or d < 2:
                raise DimensionError(f"{name} must be an integer >= 2, got {d!r}")

    @property
    def total(self) -> int:
        return self.d_a * self.d_b

    def as_tuple(self) -> tuple[int, int]:
        return (self.d_a, self.d_b)

    @classmethod
    def of(cls, dims) -> "BipartiteDims":
        if isinstance(dims, BipartiteDims):
            return dims
        d_a, d_b = dims
        return cls(int(d_a), int(d_b))


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def _check_square(m: np.ndarray, dims: BipartiteDims) -> None:
    n = dims.total
    if m.shape != (n, n):
        raise DimensionError(
            f"matrix of shape {m.shape} does not match dims {dims.as_tuple()}"
        )


def partial_trace(m, dims, which: Literal["A", "B"] = "B") -> np.ndarray:
    """Trace out subsystem ``which`` and return the reduced matrix on the other one."""
    m = as_matrix(m)
    dims = BipartiteDims.of(dims)
    _check_square(m, dims)
    t = m.reshape(dims.d_a, dims.d_b, dims.d_a, dims.d_b)
    if which == "B":
        return np.einsum("ikjk->ij", t)
    if which == "A":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def partial_transpose(m, dims) -> np.ndarray:
    """Transpose the B-factor indices only."""
    m = as_matrix(m)
    dims = BipartiteDims.of(dims)
    _check_square(m, dims)
    t = m.reshape(dims.d_a, dims.d_b, dims.d_a, dims.d_b)
    return t.transpose(0, 3, 2, 1).reshape(dims.total, dims.total)


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with values ascending and eigenvectors in
    the columns of ``vectors``. Sweeps stop once the Frobenius norm of the
    off-diagonal part drops below ``JACOBI_OFF_TOL``.

    Raises
    ------
    NotHermitianError
        If ``max |m - m^dagger|`` exceeds ``tol``.
    """
    a = as_matrix(m)
    n, n2 = a.shape
    if n != n2:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (defect {defect:.3g})")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(JACOBI_MAX_SWEEPS):
        if np.linalg.norm(a[offdiag]) < JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # columns p, q of J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
                    dtype=np.complex128,
                )
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = dagger(j) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ j
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_spectrum(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return hermitian_eig(m, tol)[0]


def is_psd(m: np.ndarray, tol: float) -> bool:
    """True iff the Hermitian ``m`` has minimum eigenvalue above ``-tol``.

    Decided by a Cholesky factorization of ``m + tol * I``, which exists
    exactly when that shifted matrix is positive definite.
    """
    try:
        np.linalg.cholesky(m + tol * np.eye(m.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))) <= tol


def align_global_phase(m: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Multiply ``m`` by the unit phase that matches ``ref`` at ref's largest entry."""
    flat = np.argmax(np.abs(ref))
    idx = np.unravel_index(flat, ref.shape)
    if abs(m[idx]) == 0.0:
        return m
    phase = ref[idx] / m[idx]
    return m * (phase / abs(phase))


def phase_distance(a, b) -> float:
    """``max |a - e^{i phi} b|`` with ``phi`` fixed by aligning the largest entry of ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return float(np.max(np.abs(a - align_global_phase(b, a))))
