"""Constructors for the state families used throughout the package.

Covers one-excitation ("W-class") qudit states, their partially coherent
superpositions with the vacuum, the phase damping channel, the two known
counterexample states to the concurrence monogamy inequality, maximally
entangled pairs, GHZ states, and coarse-graining of parties into blocks.

Also defines the on-disk state-spec document format (YAML key-value tree)
consumed by the command line front end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import yaml

from .qlinalg import (
    TOL_NORM,
    TOL_RENORM,
    DensityOperator,
    DimensionProfile,
    DomainError,
    PureState,
)


class SpecFormatError(DomainError):
    """A state-spec document is malformed; the message names the field."""


@dataclass(frozen=True)
class WClassSpec:
    """Coefficient table of an n-party, d-level one-excitation state.

    ``a[j-1, i-1]`` is the amplitude of the basis state with digit i at
    party j and zeros elsewhere (j in 1..n, i in 1..d-1).  The table is
    normalized: sum |a|^2 = 1.
    """

    n: int
    d: int
    a: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"need at least 2 parties, got {self.n}")
        if self.d < 2:
            raise DomainError(f"local dimension must be >= 2, got {self.d}")
        table = np.asarray(self.a, dtype=complex)
        if table.shape != (self.n, self.d - 1):
            raise DomainError(
                f"coefficient table has shape {table.shape}, expected {(self.n, self.d - 1)}"
            )
        total = float(np.sum(np.abs(table) ** 2))
        if abs(total - 1.0) > TOL_RENORM:
            raise DomainError(f"coefficient table norm^2 {total} deviates from 1")
        if abs(total - 1.0) > TOL_NORM:
            table = table / np.sqrt(total)
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "a", table)

    @property
    def profile(self) -> DimensionProfile:
        return DimensionProfile((self.d,) * self.n)

    @classmethod
    def symmetric(cls, n: int, d: int = 2) -> "WClassSpec":
        """Uniform table: every party and level carries equal weight."""
        a = np.full((n, d - 1), 1.0 / np.sqrt(n * (d - 1)), dtype=complex)
        return cls(n, d, a)


@dataclass(frozen=True)
class PCSSpec:
    """A one-excitation state in partially coherent superposition with the vacuum.

    ``p`` is the excitation weight and ``lam`` the degree of coherence of
    the cross terms between the excited component and the vacuum.
    """

    w: WClassSpec
    p: float
    lam: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lam must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class ExcitationWeights:
    """How the single excitation of a W-class state is shared among parties.

    ``off_focus`` is the total weight carried by parties other than party 1;
    ``off_pair[i]`` (i = 2..n, keyed by party) is the weight carried by
    parties other than both 1 and i.  The per-party weights off_focus -
    off_pair[i] sum back to off_focus.
    """

    off_focus: float
    off_pair: dict[int, float]

    @classmethod
    def from_spec(cls, spec: WClassSpec) -> "ExcitationWeights":
        per_party = np.sum(np.abs(spec.a) ** 2, axis=1)
        off_focus = float(1.0 - per_party[0])
        off_pair = {
            i: float(1.0 - per_party[0] - per_party[i - 1]) for i in range(2, spec.n + 1)
        }
        return cls(off_focus=off_focus, off_pair=off_pair)


@dataclass(frozen=True)
class PartitionSpec:
    """Ordered partition of the parties 1..n into disjoint blocks."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(int(p) for p in b)) for b in self.blocks)
        flat = [p for b in blocks for p in b]
        if not blocks or any(len(b) == 0 for b in blocks):
            raise DomainError("every block must be nonempty")
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise DomainError(f"blocks {blocks} do not partition 1..{len(flat)}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @classmethod
    def singletons(cls, n: int) -> "PartitionSpec":
        return cls(tuple((p,) for p in range(1, n + 1)))


def build_w_state(spec: WClassSpec) -> PureState:
    """Pure state with amplitude a[j,i] on the basis state of digit i at party j."""
    profile = spec.profile
    vec = np.zeros(profile.size, dtype=complex)
    for j in range(1, spec.n + 1):
        for i in range(1, spec.d):
            digits = [0] * spec.n
            digits[j - 1] = i
            vec[profile.index_of(digits)] = spec.a[j - 1, i - 1]
    return PureState(profile, vec)


def vacuum_state(profile: DimensionProfile) -> PureState:
    vec = np.zeros(profile.size, dtype=complex)
    vec[0] = 1.0
    return PureState(profile, vec)


def build_pcs_density(spec: PCSSpec) -> DensityOperator:
    """Density operator p|W><W| + (1-p)|vac><vac| + lam sqrt(p(1-p)) cross terms."""
    w = build_w_state(spec.w).amplitudes
    vac = vacuum_state(spec.w.profile).amplitudes
    cross = np.outer(w, vac.conj())
    mat = (
        spec.p * np.outer(w, w.conj())
        + (1.0 - spec.p) * np.outer(vac, vac.conj())
        + spec.lam * np.sqrt(spec.p * (1.0 - spec.p)) * (cross + cross.conj().T)
    )
    return DensityOperator(spec.w.profile, mat)


def coherent_superposition(spec: PCSSpec) -> PureState:
    """The fully coherent case: sqrt(p)|W> + sqrt(1-p)|vac>."""
    w = build_w_state(spec.w).amplitudes
    vac = vacuum_state(spec.w.profile).amplitudes
    return PureState(spec.w.profile, np.sqrt(spec.p) * w + np.sqrt(1.0 - spec.p) * vac)


def apply_phase_damping(psi: PureState, lam: float) -> DensityOperator:
    """Phase damping of the coherences with the all-zero product state.

    Kraus operators: sqrt(lam) I, sqrt(1-lam)(I - P_vac), sqrt(1-lam) P_vac,
    where P_vac projects onto the vacuum of the full multi-party space.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lam must lie in [0, 1], got {lam}")
    vec = psi.amplitudes
    rho = np.outer(vec, vec.conj())
    size = psi.profile.size
    p_vac = np.zeros((size, size), dtype=complex)
    p_vac[0, 0] = 1.0
    kraus = [
        np.sqrt(lam) * np.eye(size, dtype=complex),
        np.sqrt(1.0 - lam) * (np.eye(size, dtype=complex) - p_vac),
        np.sqrt(1.0 - lam) * p_vac,
    ]
    out = np.zeros_like(rho)
    for e in kraus:
        out += e @ rho @ e.conj().T
    return DensityOperator(psi.profile, out)


def ou_state() -> PureState:
    """The totally antisymmetric three-qutrit state.

    Levels are labelled 0..2 (the conventional 1..3 labels shifted down so
    the vacuum convention matches the rest of the package).
    """
    profile = DimensionProfile((3, 3, 3))
    vec = np.zeros(profile.size, dtype=complex)
    amp = 1.0 / np.sqrt(6.0)
    for digits, sign in (
        ((0, 1, 2), +1),
        ((0, 2, 1), -1),
        ((1, 2, 0), +1),
        ((1, 0, 2), -1),
        ((2, 0, 1), +1),
        ((2, 1, 0), -1),
    ):
        vec[profile.index_of(digits)] = sign * amp
    return PureState(profile, vec)


def kim_sanders_state() -> PureState:
    """The 3x2x2 counterexample state to the concurrence monogamy inequality."""
    profile = DimensionProfile((3, 2, 2))
    vec = np.zeros(profile.size, dtype=complex)
    amp = 1.0 / np.sqrt(6.0)
    vec[profile.index_of((0, 1, 0))] = np.sqrt(2.0) * amp
    vec[profile.index_of((1, 0, 1))] = np.sqrt(2.0) * amp
    vec[profile.index_of((2, 0, 0))] = amp
    vec[profile.index_of((2, 1, 1))] = amp
    return PureState(profile, vec)


def maximally_entangled(d: int) -> PureState:
    """(1/sqrt(d)) sum_i |ii> on a (d, d) profile."""
    if d < 2:
        raise DomainError(f"local dimension must be >= 2, got {d}")
    profile = DimensionProfile((d, d))
    vec = np.zeros(profile.size, dtype=complex)
    for i in range(d):
        vec[profile.index_of((i, i))] = 1.0 / np.sqrt(d)
    return PureState(profile, vec)


def ghz_state(n: int = 3, d: int = 2) -> PureState:
    """(1/sqrt(d)) sum_i |i...i> on n parties."""
    if n < 2 or d < 2:
        raise DomainError("GHZ state needs n >= 2 parties of dimension >= 2")
    profile = DimensionProfile((d,) * n)
    vec = np.zeros(profile.size, dtype=complex)
    for i in range(d):
        vec[profile.index_of((i,) * n)] = 1.0 / np.sqrt(d)
    return PureState(profile, vec)


def coarse_grain(spec: WClassSpec, partition: PartitionSpec) -> WClassSpec:
    """Merge parties blockwise into an m-party one-excitation spec.

    The merged coefficient for block s at level i is sqrt(q_si) >= 0 with
    q_si the total squared weight the block's parties carry at level i;
    phases are absorbed into the implicit block-local basis relabelling
    (see ``block_isometry``).
    """
    if partition.n != spec.n:
        raise DomainError(f"partition covers {partition.n} parties, spec has {spec.n}")
    merged = np.zeros((partition.m, spec.d - 1), dtype=complex)
    for s, block in enumerate(partition.blocks):
        weights = np.sum(np.abs(spec.a[[j - 1 for j in block], :]) ** 2, axis=0)
        merged[s, :] = np.sqrt(weights)
    return WClassSpec(partition.m, spec.d, merged)


def block_isometry(spec: WClassSpec, partition: PartitionSpec, s: int) -> np.ndarray:
    """Isometry from block s's merged qudit into the block's physical space.

    Column 0 is the block vacuum; column i (1 <= i <= d-1) is the block's
    normalized one-excitation component at level i, or an arbitrary unit
    vector orthogonal to the previous columns when the block carries no
    weight at that level.
    """
    block = partition.blocks[s]
    block_profile = DimensionProfile((spec.d,) * len(block))
    size = block_profile.size
    cols = np.zeros((size, spec.d), dtype=complex)
    cols[0, 0] = 1.0
    for i in range(1, spec.d):
        v = np.zeros(size, dtype=complex)
        for pos, party in enumerate(block):
            digits = [0] * len(block)
            digits[pos] = i
            v[block_profile.index_of(digits)] = spec.a[party - 1, i - 1]
        nrm = np.linalg.norm(v)
        if nrm > 1e-15:
            cols[:, i] = v / nrm
        else:
            # Zero-weight level: complete with any unit vector orthogonal
            # to the columns chosen so far.
            for k in range(size):
                cand = np.zeros(size, dtype=complex)
                cand[k] = 1.0
                cand -= cols @ (cols.conj().T @ cand)
                if np.linalg.norm(cand) > 1e-7:
                    cols[:, i] = cand / np.linalg.norm(cand)
                    break
    return cols


def expand_coarse_state(spec: WClassSpec, partition: PartitionSpec) -> PureState:
    """Embed the coarse-grained state back into the original party space."""
    coarse = coarse_grain(spec, partition)
    coarse_state = build_w_state(coarse).amplitudes
    iso = block_isometry(spec, partition, 0)
    for s in range(1, partition.m):
        iso = np.kron(iso, block_isometry(spec, partition, s))
    expanded = iso @ coarse_state
    # Blocks list parties in ascending order, but the partition's block
    # order may interleave them; permute back to party order 1..n.
    order = [p for b in partition.blocks for p in b]
    perm = np.argsort(order)
    dims = tuple(spec.d for _ in range(spec.n))
    tensor = expanded.reshape(dims).transpose(perm)
    return PureState(DimensionProfile(dims), tensor.reshape(-1))


def pair_marginal_analytic(spec: PCSSpec, i: int) -> DensityOperator:
    """Marginal of the partially coherent state on parties (1, i), closed form.

    The all-zero matrix element carries weight p*off_pair(i) + (1 - p):
    tracing the full state fixes it uniquely, and the package resolves the
    weight that way rather than from any display formula.
    """
    w = spec.w
    if not 2 <= i <= w.n:
        raise DomainError(f"party {i} out of range 2..{w.n}")
    weights = ExcitationWeights.from_spec(w)
    profile = DimensionProfile((w.d, w.d))
    a1 = w.a[0, :]
    ai = w.a[i - 1, :]
    size = profile.size
    mat = np.zeros((size, size), dtype=complex)

    def idx(x: int, y: int) -> int:
        return profile.index_of((x, y))

    for k in range(1, w.d):
        for l in range(1, w.d):
            mat[idx(k, 0), idx(l, 0)] += spec.p * a1[k - 1] * np.conj(a1[l - 1])
            mat[idx(k, 0), idx(0, l)] += spec.p * a1[k - 1] * np.conj(ai[l - 1])
            mat[idx(0, k), idx(l, 0)] += spec.p * ai[k - 1] * np.conj(a1[l - 1])
            mat[idx(0, k), idx(0, l)] += spec.p * ai[k - 1] * np.conj(ai[l - 1])
    mat[idx(0, 0), idx(0, 0)] += spec.p * weights.off_pair[i] + (1.0 - spec.p)
    coh = spec.lam * np.sqrt(spec.p * (1.0 - spec.p))
    for k in range(1, w.d):
        mat[idx(k, 0), idx(0, 0)] += coh * a1[k - 1]
        mat[idx(0, k), idx(0, 0)] += coh * ai[k - 1]
        mat[idx(0, 0), idx(k, 0)] += coh * np.conj(a1[k - 1])
        mat[idx(0, 0), idx(0, k)] += coh * np.conj(ai[k - 1])
    return DensityOperator(profile, mat)


# ---------------------------------------------------------------------------
# State-spec document format
# ---------------------------------------------------------------------------

_KINDS = ("amplitudes", "w_class", "pcs", "ou", "kim_sanders", "max_entangled")


def _as_complex(value, field: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, (int, float)) and isinstance(im, (int, float)):
            return complex(re, im)
    raise SpecFormatError(f"field '{field}': expected a number or [re, im] pair, got {value!r}")


def _parse_profile(doc: dict) -> DimensionProfile:
    dims = doc.get("profile")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) for d in dims):
        raise SpecFormatError("field 'profile': expected a list of integers")
    try:
        return DimensionProfile(tuple(dims))
    except DomainError as exc:
        raise SpecFormatError(f"field 'profile': {exc}") from exc


def _parse_digits(value, profile: DimensionProfile) -> Sequence[int]:
    if isinstance(value, str):
        digits = [int(c) for c in value if not c.isspace()]
    elif isinstance(value, list):
        digits = [int(v) for v in value]
    else:
        raise SpecFormatError(f"field 'amplitudes': bad index digits {value!r}")
    if len(digits) != profile.n:
        raise SpecFormatError(
            f"field 'amplitudes': index {value!r} has {len(digits)} digits, expected {profile.n}"
        )
    return digits


def _parse_w_table(doc: dict) -> WClassSpec:
    table = doc.get("coefficients")
    if not isinstance(table, list) or not table:
        raise SpecFormatError("field 'coefficients': expected a list of per-party rows")
    rows = []
    for j, row in enumerate(table, start=1):
        if not isinstance(row, list) or not row:
            raise SpecFormatError(f"field 'coefficients': party {j} row must be a nonempty list")
        rows.append([_as_complex(v, f"coefficients[{j}]") for v in row])
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SpecFormatError("field 'coefficients': all rows must have the same length")
    try:
        return WClassSpec(len(rows), width + 1, np.array(rows, dtype=complex))
    except DomainError as exc:
        raise SpecFormatError(f"field 'coefficients': {exc}") from exc


def parse_state_spec(text: str):
    """Parse a state-spec document into a PureState or DensityOperator.

    Inputs whose normalization deviates by more than 1e-8 are rejected.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecFormatError(f"not a valid document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecFormatError("document must be a key-value mapping")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise SpecFormatError(f"field 'kind': expected one of {_KINDS}, got {kind!r}")

    if kind == "ou":
        return ou_state()
    if kind == "kim_sanders":
        return kim_sanders_state()
    if kind == "max_entangled":
        d = doc.get("d")
        if not isinstance(d, int):
            raise SpecFormatError("field 'd': expected an integer")
        try:
            return maximally_entangled(d)
        except DomainError as exc:
            raise SpecFormatError(f"field 'd': {exc}") from exc
    if kind == "amplitudes":
        profile = _parse_profile(doc)
        entries = doc.get("amplitudes")
        if not isinstance(entries, list) or not entries:
            raise SpecFormatError("field 'amplitudes': expected a list of (digits, re, im) triples")
        vec = np.zeros(profile.size, dtype=complex)
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 3:
                raise SpecFormatError(
                    f"field 'amplitudes': expected [digits, re, im] triple, got {entry!r}"
                )
            digits, re, im = entry
            if not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
                raise SpecFormatError(f"field 'amplitudes': non-numeric amplitude in {entry!r}")
            vec[profile.index_of(_parse_digits(digits, profile))] = complex(re, im)
        try:
            return PureState(profile, vec)
        except DomainError as exc:
            raise SpecFormatError(f"field 'amplitudes': {exc}") from exc

    wspec = _parse_w_table(doc)
    if "profile" in doc:
        declared = _parse_profile(doc)
        if declared.dims != wspec.profile.dims:
            raise SpecFormatError(
                f"field 'profile': {declared.dims} does not match the coefficient table "
                f"({wspec.profile.dims})"
            )
    if kind == "w_class":
        return build_w_state(wspec)
    p = doc.get("p")
    lam = doc.get("lambda")
    if not isinstance(p, (int, float)):
        raise SpecFormatError("field 'p': expected a number in [0, 1]")
    if not isinstance(lam, (int, float)):
        raise SpecFormatError("field 'lambda': expected a number in [0, 1]")
    try:
        return build_pcs_density(PCSSpec(wspec, float(p), float(lam)))
    except DomainError as exc:
        raise SpecFormatError(f"fields 'p'/'lambda': {exc}") from exc


def parse_w_spec(text: str) -> WClassSpec:
    """Parse just the coefficient table of a w_class or pcs document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecFormatError(f"not a valid document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecFormatError("document must be a key-value mapping")
    if doc.get("kind") not in ("w_class", "pcs"):
        raise SpecFormatError("field 'kind': expected w_class or pcs")
    return _parse_w_table(doc)


def load_state_spec(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_state_spec(fh.read())


def load_w_spec(path: str) -> WClassSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_w_spec(fh.read())
