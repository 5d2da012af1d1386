"""Dense pure-state and density-matrix algebra.

Subsystem 0 is always the system of interest; subsystems 1..N form the
environment. All entropies are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
EIG_CLIP = 1e-10
EIG_FLOOR = 1e-12

# Dense representations are refused above this total dimension; larger
# universes go through the two-branch engine instead.
DENSE_CAP = 2**16


def binary_entropy(p: float) -> float:
    """Shannon entropy of a (p, 1-p) distribution in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def overlap_entropy(x: float) -> float:
    """Entropy of the rank-two spectrum ((1-x)/2, (1+x)/2).

    This is the entropy of an equal mixture of two pure states whose
    overlap magnitude is x; binary_entropy((1+x)/2) by definition.
    """
    return binary_entropy(0.5 * (1.0 + x))


@dataclass(frozen=True, eq=False)
class FragmentSpec:
    """An ordered set of subsystem indices naming a fragment."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int]):
        idx = tuple(int(i) for i in indices)
        if any(i < 0 for i in idx):
            raise ValueError("fragment indices must be non-negative")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("fragment indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def disjoint(self, other: "FragmentSpec") -> bool:
        return not set(self.indices) & set(other.indices)

    def union(self, other: "FragmentSpec") -> "FragmentSpec":
        return FragmentSpec(sorted(set(self.indices) | set(other.indices)))

    def complement(self, n_sites: int) -> "FragmentSpec":
        return FragmentSpec(i for i in range(n_sites) if i not in self.indices)

    def validate_within(self, n_sites: int) -> None:
        if self.indices and self.indices[-1] >= n_sites:
            raise ValueError(
                f"fragment index {self.indices[-1]} out of range for {n_sites} subsystems"
            )


def require_disjoint(*frags: FragmentSpec) -> None:
    seen: set[int] = set()
    for f in frags:
        overlap = seen & set(f.indices)
        if overlap:
            raise ValueError(f"fragments overlap on subsystems {sorted(overlap)}")
        seen |= set(f.indices)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over a list of subsystem dimensions."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __init__(self, dims: Sequence[int], amplitudes: np.ndarray):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError("dims must be positive integers")
        total = math.prod(dims)
        if total > DENSE_CAP:
            raise ValueError(f"total dimension {total} exceeds dense cap {DENSE_CAP}")
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != total:
            raise ValueError(f"amplitude length {amps.size} != product of dims {total}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > 1e-10:
            raise ValueError(f"state norm^2 deviates from 1 by {abs(norm_sq - 1.0):.3e}")
        amps = amps / math.sqrt(norm_sq)
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return len(self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix with dims bookkeeping."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __init__(self, dims: Sequence[int], matrix: np.ndarray, check_psd: bool = True):
        dims = tuple(int(d) for d in dims)
        total = math.prod(dims)
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (total, total):
            raise ValueError(f"matrix shape {mat.shape} != ({total}, {total})")
        herm_dev = float(np.max(np.abs(mat - mat.conj().T))) if total else 0.0
        if herm_dev > HERMITIAN_TOL:
            raise ValueError(f"matrix deviates from Hermitian by {herm_dev:.3e}")
        trace_dev = abs(float(np.trace(mat).real) - 1.0)
        if trace_dev > HERMITIAN_TOL:
            raise ValueError(f"trace deviates from 1 by {trace_dev:.3e}")
        mat = 0.5 * (mat + mat.conj().T)
        if check_psd:
            min_eig = float(np.linalg.eigvalsh(mat)[0])
            if min_eig < -EIG_CLIP:
                raise ValueError(f"matrix has negative eigenvalue {min_eig:.3e}")
        mat.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def n_sites(self) -> int:
        return len(self.dims)


State = Union[PureState, DensityMatrix]


def tensor_product(states: Sequence[PureState]) -> PureState:
    """Kronecker product of pure states, in the given order."""
    if not states:
        raise ValueError("no factors")
    dims = tuple(d for s in states for d in s.dims)
    amps = reduce(np.kron, (s.amplitudes for s in states))
    return PureState(dims, amps)


def _check_unitary(u: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))
    if dev > tol:
        raise ValueError(f"matrix deviates from unitary by {dev:.3e}")


def apply_unitary(state: PureState, u: np.ndarray, targets: FragmentSpec) -> PureState:
    """Apply a unitary to the listed subsystems (identity elsewhere)."""
    targets.validate_within(state.n_sites)
    if len(targets) == 0:
        raise ValueError("apply_unitary needs at least one target")
    u = np.asarray(u, dtype=complex)
    d_t = math.prod(state.dims[i] for i in targets)
    if u.shape != (d_t, d_t):
        raise ValueError(f"unitary shape {u.shape} does not match target dimension {d_t}")
    _check_unitary(u)

    n = state.n_sites
    rest = [i for i in range(n) if i not in targets]
    tensor = state.amplitudes.reshape(state.dims)
    tensor = np.transpose(tensor, list(targets) + rest)
    flat = tensor.reshape(d_t, -1)
    flat = u @ flat
    tensor = flat.reshape([state.dims[i] for i in targets] + [state.dims[i] for i in rest])
    inverse = np.argsort(list(targets) + rest)
    tensor = np.transpose(tensor, inverse)
    return PureState(state.dims, tensor.reshape(-1))


def partial_trace(state: State, keep: FragmentSpec) -> DensityMatrix:
    """Reduced density matrix on the kept subsystems, in ascending order."""
    if len(keep) == 0:
        raise ValueError("keep set must be nonempty")
    keep.validate_within(len(state.dims))
    keep_list = list(keep)
    dims = state.dims
    kept_dims = tuple(dims[i] for i in keep_list)

    if isinstance(state, PureState):
        rest = [i for i in range(len(dims)) if i not in keep]
        tensor = state.amplitudes.reshape(dims)
        tensor = np.transpose(tensor, keep_list + rest)
        mat = tensor.reshape(math.prod(kept_dims), -1)
        rho = mat @ mat.conj().T
        return DensityMatrix(kept_dims, rho, check_psd=False)

    rho = state.matrix.reshape(dims + dims)
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    for count, idx in enumerate(sorted(traced, reverse=True)):
        offset = n - count
        rho = np.trace(rho, axis1=idx, axis2=idx + offset)
    side = math.prod(kept_dims)
    return DensityMatrix(kept_dims, rho.reshape(side, side), check_psd=False)


def entropy_of_spectrum(eigvals: np.ndarray) -> float:
    lam = np.asarray(eigvals, dtype=float)
    if lam.size and float(lam.min()) < -EIG_CLIP:
        raise ValueError(f"spectrum has negative eigenvalue {float(lam.min()):.3e}")
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > EIG_FLOOR]
    if lam.size == 0:
        return 0.0
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(dm: DensityMatrix) -> float:
    """Entropy of a density matrix in bits; tiny eigenvalues contribute 0."""
    return entropy_of_spectrum(np.linalg.eigvalsh(dm.matrix))


def schmidt_entropy(state: PureState, frag: FragmentSpec) -> float:
    """Marginal entropy of a fragment of a pure state via singular values.

    Equivalent to von_neumann_entropy(partial_trace(state, frag)) but avoids
    forming the reduced matrix.
    """
    frag.validate_within(state.n_sites)
    if len(frag) == 0 or len(frag) == state.n_sites:
        return 0.0
    keep_list = list(frag)
    rest = [i for i in range(state.n_sites) if i not in frag]
    tensor = state.amplitudes.reshape(state.dims)
    tensor = np.transpose(tensor, keep_list + rest)
    mat = tensor.reshape(math.prod(state.dims[i] for i in keep_list), -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return entropy_of_spectrum(sv**2)


def mutual_information(state: State, part_a: FragmentSpec, part_b: FragmentSpec) -> float:
    """I(A:B) = H(A) + H(B) - H(AB) for disjoint parts of a state."""
    require_disjoint(part_a, part_b)
    part_a.validate_within(len(state.dims))
    part_b.validate_within(len(state.dims))
    union = part_a.union(part_b)
    if isinstance(state, PureState):
        h = [schmidt_entropy(state, f) for f in (part_a, part_b, union)]
    else:
        h = [von_neumann_entropy(partial_trace(state, f)) for f in (part_a, part_b, union)]
    return h[0] + h[1] - h[2]
