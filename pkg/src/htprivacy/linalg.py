"""Dense complex Hermitian linear algebra for small matrices (dim <= 64).

The eigensolver is a cyclic Jacobi method with complex rotations. Everything
else in the package (positive parts, supports, matrix functions) is built on
:func:`hermitian_eig`, so its accuracy bounds the accuracy of every divergence.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionOverflow, NoConvergence, NotHermitian, NotPSD

MAX_DIM = 64
HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-10
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


class HermitianEigenSystem(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns


def _jacobi_sweeps(a, v, tol, max_sweeps):
    # In-place cyclic Jacobi on a Hermitian `a`; accumulates rotations into `v`.
    # Returns the number of sweeps used, or -1 if the budget ran out.
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q].real ** 2 + a[p, q].imag ** 2
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = [[c, s], [-s*conj(ph), c*conj(ph)]] acting on columns p, q.
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
    return -1


try:
    from numba import njit

    _jacobi_kernel = njit(cache=True, nogil=True)(_jacobi_sweeps)
except ImportError:  # pragma: no cover - numba is optional
    _jacobi_kernel = _jacobi_sweeps


def as_matrix(a) -> np.ndarray:
    """Coerce to a square complex128 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def hermiticity_defect(a) -> float:
    return frobenius(a - a.conj().T)


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(a)
    return hermiticity_defect(m) <= tol * max(1.0, frobenius(m))


def as_hermitian(a) -> np.ndarray:
    """Validate Hermiticity and return the exactly Hermitian part."""
    m = as_matrix(a)
    if m.shape[0] > MAX_DIM:
        raise DimensionOverflow(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL * max(1.0, frobenius(m)):
        raise NotHermitian(f"||A - A^dag||_F = {defect:.3e}")
    return 0.5 * (m + m.conj().T)


def hermitian_eig(a) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and a unitary matrix whose columns
    are the matching eigenvectors. The order of eigenvectors inside a
    degenerate cluster is whatever the rotation sequence produced.

    Raises:
        NotHermitian: if ``||A - A^dag||_F`` exceeds ``1e-10 * max(1, ||A||_F)``.
        NoConvergence: if 100 sweeps do not reduce the off-diagonal mass to
            ``1e-13 * ||A||_F``.
    """
    return trusted_hermitian_eig(as_hermitian(a))


def trusted_hermitian_eig(a: np.ndarray) -> HermitianEigenSystem:
    """:func:`hermitian_eig` without input validation, for internal hot loops.

    ``a`` must already be an exactly Hermitian complex array of dim <= 64.
    """
    work = np.array(a, dtype=np.complex128, order="C")
    n = work.shape[0]
    vecs = np.eye(n, dtype=np.complex128)
    tol = JACOBI_TOL * frobenius(work)
    if _jacobi_kernel(work, vecs, tol, MAX_SWEEPS) < 0:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    vals = np.real(np.diag(work)).copy()
    order = np.argsort(vals, kind="stable")
    return HermitianEigenSystem(vals[order], vecs[:, order])


def eigvalsh(a) -> np.ndarray:
    return hermitian_eig(a).eigenvalues


def positive_part_trace(a) -> float:
    """Sum of the strictly positive eigenvalues of a Hermitian matrix."""
    vals = eigvalsh(a)
    return float(np.sum(vals[vals > 0.0]))


def positive_projector(a, strict: bool = True) -> np.ndarray:
    """Projector onto the eigenspace of eigenvalues > 0 (or >= 0 if not strict)."""
    vals, vecs = hermitian_eig(a)
    keep = vals > 0.0 if strict else vals >= 0.0
    sub = vecs[:, keep]
    return sub @ sub.conj().T


def trace_norm(a) -> float:
    """Schatten 1-norm: the sum of singular values."""
    m = as_matrix(a)
    if m.shape[0] > MAX_DIM:
        raise DimensionOverflow(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    if is_hermitian(m):
        return float(np.sum(np.abs(eigvalsh(m))))
    gram = eigvalsh(m.conj().T @ m)
    return float(np.sum(np.sqrt(np.clip(gram, 0.0, None))))


def _psd_spectrum(a, rank_tol: float):
    vals, vecs = hermitian_eig(a)
    top = max(float(vals[-1]), 0.0)
    if vals[0] < -rank_tol * max(1.0, top):
        raise NotPSD(f"minimum eigenvalue {vals[0]:.3e} below tolerance")
    keep = vals > rank_tol * top
    return vals, vecs, keep


def support_projector(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue > rank_tol * lambda_max."""
    _, vecs, keep = _psd_spectrum(a, rank_tol)
    sub = vecs[:, keep]
    return sub @ sub.conj().T


def inv_sqrt_on_support(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse square root of a PSD matrix."""
    vals, vecs, keep = _psd_spectrum(a, rank_tol)
    sub = vecs[:, keep]
    return (sub * (1.0 / np.sqrt(vals[keep]))) @ sub.conj().T


def hermitian_function(a, fn) -> np.ndarray:
    """Apply a scalar function to the spectrum of a Hermitian matrix."""
    vals, vecs = hermitian_eig(a)
    return (vecs * fn(vals)) @ vecs.conj().T


def kron(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionOverflow(
            f"product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)
