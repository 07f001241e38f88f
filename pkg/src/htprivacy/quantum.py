"""Density operators, Kraus channels, the depolarizing channel and seeded generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    NotDensity,
    NotPSD,
    NotTracePreserving,
    OutOfRange,
    ZeroVector,
)

DENSITY_TOL = 1e-10
KRAUS_TOL = 1e-9
CLIP_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A positive semi-definite, unit-trace matrix.

    Construction validates Hermiticity, trace and spectrum to 1e-10 and
    stores an exactly Hermitian, read-only copy.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] > linalg.MAX_DIM:
            raise DimensionOverflow(f"dimension {m.shape[0]} exceeds {linalg.MAX_DIM}")
        if not linalg.is_hermitian(m, DENSITY_TOL):
            raise NotDensity("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > DENSITY_TOL:
            raise NotDensity(f"trace is {tr!r}, expected 1")
        lo = linalg.eigvalsh(m)[0]
        if lo < -DENSITY_TOL:
            raise NotDensity(f"minimum eigenvalue {lo:.3e} is negative")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


StateLike = Union[DensityOperator, np.ndarray]


def as_density(x) -> DensityOperator:
    return x if isinstance(x, DensityOperator) else DensityOperator(x)


def repair_density(m: np.ndarray) -> DensityOperator:
    """Turn a numerically-almost density matrix into a valid one.

    Eigenvalues in [-1e-9, 0) are clipped to zero and the trace renormalized;
    anything more negative is reported as a genuine error.
    """
    m = 0.5 * (m + m.conj().T)
    vals, vecs = linalg.hermitian_eig(m)
    if vals[0] < -CLIP_TOL:
        raise NotPSD(f"channel output has eigenvalue {vals[0]:.3e}")
    if vals[0] < 0.0:
        vals = np.clip(vals, 0.0, None)
        m = (vecs * vals) @ vecs.conj().T
    tr = np.trace(m).real
    return DensityOperator(m / tr)


def density_from_pure(amplitudes, normalize: bool = False) -> DensityOperator:
    """Rank-one density operator |psi><psi|."""
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ZeroVector("amplitude vector is zero")
    if normalize:
        psi = psi / norm
    elif abs(norm - 1.0) > 1e-8:
        raise OutOfRange(f"amplitude vector has norm {norm!r}; pass normalize=True")
    return DensityOperator(np.outer(psi, psi.conj()))


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim) / dim)


def basis_state(dim: int, index: int) -> DensityOperator:
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[index, index] = 1.0
    return DensityOperator(m)


def tensor_state(rho1: StateLike, rho2: StateLike) -> DensityOperator:
    return DensityOperator(linalg.kron(np.asarray(rho1), np.asarray(rho2)))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A completely positive trace-preserving map rho -> sum_j E_j rho E_j^dag.

    Only square channels (input_dim == output_dim) are supported.
    """

    operators: tuple

    def __post_init__(self):
        ops = [np.array(op, dtype=np.complex128) for op in self.operators]
        if not ops:
            raise NotTracePreserving("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        for j, op in enumerate(ops):
            if op.shape != (dim, dim):
                raise DimensionMismatch(
                    f"Kraus operator {j} has shape {op.shape}, expected {(dim, dim)}"
                )
            if not np.all(np.isfinite(op)):
                raise NotTracePreserving(f"Kraus operator {j} has non-finite entries")
        if dim > linalg.MAX_DIM:
            raise DimensionOverflow(f"dimension {dim} exceeds {linalg.MAX_DIM}")
        if len(ops) > dim * dim:
            raise NotTracePreserving(f"{len(ops)} Kraus operators exceed dim^2 = {dim * dim}")
        gram = sum(op.conj().T @ op for op in ops)
        defect = linalg.frobenius(gram - np.eye(dim))
        if defect > KRAUS_TOL:
            raise NotTracePreserving(f"completeness defect ||sum E^dag E - I||_F = {defect:.3e}")
        object.__setattr__(self, "operators", tuple(_frozen(op) for op in ops))

    @property
    def input_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.operators[0].shape[0]

    def apply(self, rho: StateLike) -> DensityOperator:
        m = np.asarray(rho)
        if m.shape != (self.input_dim, self.input_dim):
            raise DimensionMismatch(
                f"state has shape {m.shape}, channel expects dim {self.input_dim}"
            )
        out = sum(op @ m @ op.conj().T for op in self.operators)
        return repair_density(out)

    __call__ = apply

    def kraus(self) -> "KrausChannel":
        return self


def apply_channel(channel, rho: StateLike) -> DensityOperator:
    return channel.apply(rho)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((np.asarray(u),))


def _weyl_operators(dim: int):
    # Generalized Pauli X^a Z^b; together an orthogonal basis of dim x dim matrices.
    omega = np.exp(2j * np.pi / dim)
    shift = np.roll(np.eye(dim), 1, axis=0)
    clock = np.diag(omega ** np.arange(dim))
    for a in range(dim):
        for b in range(dim):
            yield np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)


@dataclass(frozen=True)
class DepolarizingChannel:
    """rho -> (p/D) I + (1 - p) rho, applied directly as an affine map."""

    p: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRange(f"p must lie in [0, 1], got {self.p!r}")
        if self.dim < 2:
            raise OutOfRange(f"dim must be >= 2, got {self.dim!r}")

    @property
    def input_dim(self) -> int:
        return self.dim

    @property
    def output_dim(self) -> int:
        return self.dim

    def apply(self, rho: StateLike) -> DensityOperator:
        m = np.asarray(rho)
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"state has shape {m.shape}, channel expects dim {self.dim}")
        return repair_density((self.p / self.dim) * np.eye(self.dim) + (1.0 - self.p) * m)

    __call__ = apply

    def kraus(self) -> KrausChannel:
        """Explicit Kraus form, used for cross-validation and tensoring.

        The completely depolarizing map is the uniform twirl over the D^2
        Weyl operators, so the channel is (1 - p) id + (p / D^2) sum_W W . W^dag.
        The identity term is folded into the X^0 Z^0 operator.
        """
        d2 = self.dim * self.dim
        ops = []
        for k, w in enumerate(_weyl_operators(self.dim)):
            weight = self.p / d2
            if k == 0:
                weight += 1.0 - self.p
            if weight > 0.0:
                ops.append(np.sqrt(weight) * w)
        return KrausChannel(tuple(ops))


def depolarizing_apply(params: DepolarizingChannel, rho: StateLike) -> DensityOperator:
    return params.apply(rho)


def tensor_channel(e1, e2) -> KrausChannel:
    """Product channel whose Kraus operators are all pairwise Kronecker products."""
    k1 = e1.kraus().operators
    k2 = e2.kraus().operators
    if k1[0].shape[0] * k2[0].shape[0] > linalg.MAX_DIM:
        raise DimensionOverflow("product channel dimension exceeds 64")
    return KrausChannel(tuple(np.kron(a, b) for a in k1 for b in k2))


def compose_channels(outer, inner) -> KrausChannel:
    """Kraus form of ``outer`` applied after ``inner``."""
    return KrausChannel(
        tuple(a @ b for a in outer.kraus().operators for b in inner.kraus().operators)
    )


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_density(dim: int, rank: int | None = None, seed=None) -> DensityOperator:
    """Random rank-``rank`` state G G^dag / tr(G G^dag) with G complex Gaussian.

    ``seed`` may be an integer or a ``numpy.random.Generator``.
    """
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim <= linalg.MAX_DIM:
        raise OutOfRange(f"need 1 <= rank <= dim <= {linalg.MAX_DIM}, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = _complex_gaussian(rng, (dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_complex_gaussian(rng, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(dim: int, kraus_rank: int = 1, seed=None) -> KrausChannel:
    """Random channel from an isometry: orthonormal columns sliced into Kraus blocks."""
    if not 1 <= kraus_rank <= dim * dim:
        raise OutOfRange(f"kraus_rank must lie in [1, {dim * dim}], got {kraus_rank}")
    rng = np.random.default_rng(seed)
    g = _complex_gaussian(rng, (dim * kraus_rank, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return KrausChannel(tuple(q[j * dim:(j + 1) * dim, :] for j in range(kraus_rank)))


def random_traceless_hermitian(dim: int, seed=None) -> np.ndarray:
    """Random traceless Hermitian matrix scaled to trace norm 2."""
    rng = np.random.default_rng(seed)
    g = _complex_gaussian(rng, (dim, dim))
    h = g + g.conj().T
    h -= (np.trace(h).real / dim) * np.eye(dim)
    norm = linalg.trace_norm(h)
    return h * (2.0 / norm) if norm > 0 else h


def project_to_density(m) -> DensityOperator:
    """Frobenius-nearest density operator: project the spectrum onto the simplex."""
    m = np.asarray(m, dtype=np.complex128)
    vals, vecs = linalg.hermitian_eig(0.5 * (m + m.conj().T))
    u = vals[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(u) + 1)
    k = idx[u - css / idx > 0][-1]
    shift = css[k - 1] / k
    proj = np.clip(vals - shift, 0.0, None)
    out = (vecs * proj) @ vecs.conj().T
    return DensityOperator(out / np.trace(out).real)


__all__ = [
    "DensityOperator",
    "KrausChannel",
    "DepolarizingChannel",
    "apply_channel",
    "as_density",
    "basis_state",
    "compose_channels",
    "density_from_pure",
    "depolarizing_apply",
    "identity_channel",
    "maximally_mixed",
    "project_to_density",
    "random_channel",
    "random_density",
    "random_traceless_hermitian",
    "random_unitary",
    "repair_density",
    "tensor_channel",
    "tensor_state",
    "unitary_channel",
]
