"""Dense complex tensor kernel for multipartite qudit systems.

Index bookkeeping, partial trace, partial transpose, trace norm, and
spectral / Schmidt decompositions for states over a fixed tuple of local
dimensions.  Party 1 is the slowest-varying index of the flattened
amplitude vector (row-major over parties); every module in this package
relies on that convention.

All values are immutable after construction and all operations are pure
functions, so they are safe to share between concurrent tasks.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Tolerances for construction invariants and rank decisions.
TOL_NORM = 1e-10     # norm / trace deviation accepted after construction
TOL_RENORM = 1e-8    # larger deviations up to this are silently renormalized
TOL_HERM = 1e-12     # max elementwise deviation from the conjugate transpose
TOL_PSD = 1e-10      # most negative eigenvalue accepted for a density operator
TOL_RANK = 1e-12     # eigenvalues / Schmidt coefficients below this do not count


class DomainError(ValueError):
    """Input lies outside an operation's domain."""


class NumericalError(RuntimeError):
    """An internal numerical consistency check failed beyond tolerance."""


@dataclass(frozen=True)
class DimensionProfile:
    """Ordered local dimensions (d_1, ..., d_n) of the parties.

    Parties are labelled 1..n.  The flattened index of a digit string
    (i_1, ..., i_n) is sum_j i_j * stride_j with party 1 slowest, i.e.
    ``numpy.reshape(vec, dims)`` exposes party j on axis j-1.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) == 0:
            raise DomainError("profile needs at least one party")
        if any(d < 2 for d in dims):
            raise DomainError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        p = 1
        for d in self.dims:
            p *= d
        return p

    @property
    def parties(self) -> range:
        """Party labels, 1-based."""
        return range(1, self.n + 1)

    def dim_of(self, party: int) -> int:
        self._check_party(party)
        return self.dims[party - 1]

    def index_of(self, digits: Sequence[int]) -> int:
        """Flattened basis index of a digit string (one digit per party)."""
        if len(digits) != self.n:
            raise DomainError(f"expected {self.n} digits, got {len(digits)}")
        idx = 0
        for d, dim in zip(digits, self.dims):
            if not 0 <= d < dim:
                raise DomainError(f"digit {d} out of range for dimension {dim}")
            idx = idx * dim + d
        return idx

    def restrict(self, parties: Iterable[int]) -> "DimensionProfile":
        """Profile of the listed parties, in ascending party order."""
        kept = _sorted_parties(parties, self.n)
        return DimensionProfile(tuple(self.dims[p - 1] for p in kept))

    def _check_party(self, party: int) -> None:
        if not 1 <= party <= self.n:
            raise DomainError(f"party {party} out of range 1..{self.n}")


def _sorted_parties(parties: Iterable[int], n: int) -> tuple[int, ...]:
    out = tuple(sorted({int(p) for p in parties}))
    if not out:
        raise DomainError("party set must be nonempty")
    for p in out:
        if not 1 <= p <= n:
            raise DomainError(f"party {p} out of range 1..{n}")
    return out


@dataclass(frozen=True)
class Bipartition:
    """A nonempty proper subset of parties versus its complement."""

    side_a: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        side = _sorted_parties(self.side_a, self.n)
        if len(side) >= self.n:
            raise DomainError("side_a must be a proper subset of the parties")
        object.__setattr__(self, "side_a", side)

    @property
    def side_b(self) -> tuple[int, ...]:
        inside = set(self.side_a)
        return tuple(p for p in range(1, self.n + 1) if p not in inside)

    def __str__(self) -> str:
        return "".join(map(str, self.side_a)) + "|" + "".join(map(str, self.side_b))


def as_bipartition(cut: "Bipartition | int | Iterable[int]", n: int) -> Bipartition:
    """Coerce a cut given as a Bipartition, a party, or a party set."""
    if isinstance(cut, Bipartition):
        if cut.n != n:
            raise DomainError(f"cut is over {cut.n} parties, state has {n}")
        return cut
    if isinstance(cut, (int, np.integer)):
        return Bipartition((int(cut),), n)
    return Bipartition(tuple(cut), n)


def _as_unit_vector(amplitudes: np.ndarray, size: int) -> np.ndarray:
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if vec.shape != (size,):
        raise DomainError(f"amplitude vector has length {vec.size}, expected {size}")
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > TOL_RENORM:
        raise DomainError(f"state norm {nrm} deviates from 1 by more than {TOL_RENORM}")
    if abs(nrm - 1.0) > TOL_NORM:
        vec = vec / nrm
    vec = vec.copy()
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True)
class PureState:
    """A normalized amplitude vector over a DimensionProfile."""

    profile: DimensionProfile
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "amplitudes", _as_unit_vector(self.amplitudes, self.profile.size)
        )

    @property
    def dim(self) -> int:
        return self.profile.size

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.profile, np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator over a profile."""

    profile: DimensionProfile
    matrix: np.ndarray

    def __post_init__(self) -> None:
        size = self.profile.size
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (size, size):
            raise DomainError(f"matrix has shape {mat.shape}, expected {(size, size)}")
        herm_dev = float(np.max(np.abs(mat - mat.conj().T))) if size else 0.0
        if herm_dev > TOL_HERM:
            raise DomainError(f"matrix deviates from Hermitian by {herm_dev}")
        mat = (mat + mat.conj().T) / 2.0
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TOL_RENORM:
            raise DomainError(f"trace {tr} deviates from 1 by more than {TOL_RENORM}")
        if abs(tr - 1.0) > TOL_NORM:
            mat = mat / tr
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -TOL_PSD:
            raise DomainError(f"matrix has negative eigenvalue {lo}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.profile.size

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def rank(self, tol: float = TOL_RANK) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt coefficients and bases of a pure state across a cut.

    ``coefficients`` are the squared singular values, sorted descending and
    summing to one; column k of ``left_basis`` / ``right_basis`` is the k-th
    Schmidt vector on side A / B.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    rank: int


def tensor_product(a, b):
    """Kronecker product of two pure states or two density operators.

    The resulting profile is the concatenation of the operands' profiles,
    with the first operand's parties slowest-varying.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        profile = DimensionProfile(a.profile.dims + b.profile.dims)
        return PureState(profile, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        profile = DimensionProfile(a.profile.dims + b.profile.dims)
        return DensityOperator(profile, np.kron(a.matrix, b.matrix))
    raise DomainError("tensor_product requires two operands of the same kind")


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out all parties not in ``keep``.

    The result's profile lists the kept parties in ascending party order.
    """
    kept = _sorted_parties(keep, rho.profile.n)
    dims = rho.profile.dims
    n = len(dims)
    if 2 * n > len(string.ascii_letters):
        raise DomainError("too many parties for the einsum contraction")
    tensor = rho.matrix.reshape(dims + dims)
    labels = list(string.ascii_letters[: 2 * n])
    for p in range(1, n + 1):
        if p not in kept:
            labels[n + p - 1] = labels[p - 1]
    out = [labels[p - 1] for p in kept] + [labels[n + p - 1] for p in kept]
    reduced = np.einsum("".join(labels) + "->" + "".join(out), tensor)
    size = 1
    for p in kept:
        size *= dims[p - 1]
    return DensityOperator(rho.profile.restrict(kept), reduced.reshape(size, size))


def partial_transpose(rho: DensityOperator, transposed: Iterable[int]) -> np.ndarray:
    """Transpose the listed parties' indices; returns a Hermitian matrix.

    The result is generally not positive semidefinite, so it is returned as
    a plain matrix rather than a DensityOperator.
    """
    parties = _sorted_parties(transposed, rho.profile.n)
    if len(parties) >= rho.profile.n:
        raise DomainError("transposed set must be a proper subset of the parties")
    dims = rho.profile.dims
    n = len(dims)
    tensor = rho.matrix.reshape(dims + dims)
    axes = list(range(2 * n))
    for p in parties:
        axes[p - 1], axes[n + p - 1] = axes[n + p - 1], axes[p - 1]
    size = rho.profile.size
    return np.transpose(tensor, axes).reshape(size, size)


def trace_norm(h: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix: the sum of absolute eigenvalues."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > 1e-9:
        raise DomainError(f"matrix deviates from Hermitian by {dev}")
    w = np.linalg.eigvalsh((h + h.conj().T) / 2.0)
    return float(np.sum(np.abs(w)))


def cut_matrix(phi: PureState, cut: Bipartition) -> np.ndarray:
    """Amplitudes of ``phi`` reshaped to a (dim side_a, dim side_b) matrix."""
    cut = as_bipartition(cut, phi.profile.n)
    dims = phi.profile.dims
    order = cut.side_a + cut.side_b
    perm = [p - 1 for p in order]
    d_a = 1
    for p in cut.side_a:
        d_a *= dims[p - 1]
    tensor = phi.amplitudes.reshape(dims)
    return np.transpose(tensor, perm).reshape(d_a, -1)


def schmidt(phi: PureState, cut: Bipartition) -> SchmidtData:
    """Schmidt decomposition of a pure state across a bipartition."""
    mat = cut_matrix(phi, as_bipartition(cut, phi.profile.n))
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    lam = s * s
    rank = int(np.sum(lam > TOL_RANK))
    return SchmidtData(
        coefficients=lam,
        left_basis=u,
        right_basis=vh.conj().T,
        rank=rank,
    )


def spectral_decomposition(rho: DensityOperator) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a density operator, eigenvalues descending."""
    w, v = np.linalg.eigh(rho.matrix)
    order = np.argsort(w)[::-1]
    return [(float(w[k]), v[:, k].copy()) for k in order]


def operator_rank(rho: DensityOperator, tol: float = TOL_RANK) -> int:
    """Number of eigenvalues above the rank cutoff."""
    return rho.rank(tol)
