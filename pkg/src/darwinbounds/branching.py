"""Exact engine for two-branch (singly-branching) universes.

A state c0 * (x) b0_i + c1 * (x) b1_i over N+1 sites admits closed-form
marginals: every reduced state lives in the two-dimensional span of the
kept branch vectors, so entropies, mutual informations, and measured
outcome distributions follow from per-site overlap products in O(N) time,
with no dense tensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import rank_two_entropy_batch
from .qstate import (
    DensityMatrix,
    FragmentSpec,
    PureState,
    require_disjoint,
)

NORM_TOL = 1e-10
JOINT_OUTCOME_CAP = 2**16


@dataclass(frozen=True, eq=False)
class BranchingState:
    """Two-branch superposition with product branches.

    weights are the dense coefficients of the two product branches; the
    constructor guarantees the dense vector they describe has unit norm.
    site_overlaps caches <branch1_i | branch0_i> per site. Site 0 is the
    system, sites 1..N the environment.
    """

    weights: tuple[complex, complex]
    sites: tuple[tuple[np.ndarray, np.ndarray], ...]
    site_overlaps: np.ndarray
    symmetric: bool = False

    @property
    def n_env(self) -> int:
        return len(self.sites) - 1

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(pair[0].size for pair in self.sites)

    def all_sites(self) -> FragmentSpec:
        return FragmentSpec(range(self.n_sites))

    def environment(self) -> FragmentSpec:
        return FragmentSpec(range(1, self.n_sites))


def make_branching(
    weights: Sequence[complex],
    sites: Sequence[tuple[np.ndarray, np.ndarray]],
    renormalize: bool = False,
    symmetric: bool = False,
) -> BranchingState:
    """Validate and assemble a BranchingState.

    The dense norm of c0|B0> + c1|B1> must be 1 within 1e-10 unless
    renormalize is set, in which case the weights are rescaled.
    """
    if len(weights) != 2:
        raise ValueError("exactly two branch weights required")
    if not sites:
        raise ValueError("at least one site required")
    c0, c1 = complex(weights[0]), complex(weights[1])

    clean_sites = []
    overlaps = np.empty(len(sites), dtype=complex)
    for k, (b0, b1) in enumerate(sites):
        v0 = np.asarray(b0, dtype=complex).reshape(-1)
        v1 = np.asarray(b1, dtype=complex).reshape(-1)
        if v0.size != v1.size:
            raise ValueError(f"site {k}: branch vectors differ in dimension")
        n0, n1 = np.linalg.norm(v0), np.linalg.norm(v1)
        if n0 < 1e-12 or n1 < 1e-12:
            raise ValueError(f"site {k}: zero-norm branch vector")
        if abs(n0 - 1.0) > NORM_TOL or abs(n1 - 1.0) > NORM_TOL:
            raise ValueError(f"site {k}: branch vectors must be unit norm")
        v0, v1 = v0 / n0, v1 / n1
        v0.flags.writeable = False
        v1.flags.writeable = False
        clean_sites.append((v0, v1))
        overlaps[k] = np.vdot(v1, v0)

    # <B0|B1> = prod_i <b0_i|b1_i> = conj(prod overlaps)
    global_overlap = complex(np.prod(overlaps))
    norm_sq = (
        abs(c0) ** 2
        + abs(c1) ** 2
        + 2.0 * (c0 * np.conj(c1) * global_overlap).real
    )
    if norm_sq < 1e-14:
        raise ValueError("branches cancel: combination is not normalizable")
    if abs(norm_sq - 1.0) > NORM_TOL:
        if not renormalize:
            raise ValueError(
                f"dense norm^2 deviates from 1 by {abs(norm_sq - 1.0):.3e}; "
                "pass renormalize=True to rescale the weights"
            )
        scale = 1.0 / math.sqrt(norm_sq)
        c0, c1 = c0 * scale, c1 * scale
    overlaps.flags.writeable = False
    return BranchingState(
        weights=(c0, c1),
        sites=tuple(clean_sites),
        site_overlaps=overlaps,
        symmetric=symmetric,
    )


def to_dense(bs: BranchingState) -> PureState:
    """Materialize the dense vector (normalized)."""
    b0 = np.array([1.0 + 0j])
    b1 = np.array([1.0 + 0j])
    for v0, v1 in bs.sites:
        b0 = np.kron(b0, v0)
        b1 = np.kron(b1, v1)
    amps = bs.weights[0] * b0 + bs.weights[1] * b1
    amps = amps / np.linalg.norm(amps)
    return PureState(bs.dims, amps)


def fragment_overlap(bs: BranchingState, frag: FragmentSpec) -> complex:
    """Product over the fragment of per-site <branch1|branch0>."""
    frag.validate_within(bs.n_sites)
    if len(frag) == 0:
        return 1.0 + 0.0j
    return complex(np.prod(bs.site_overlaps[list(frag)]))


def marginal_entropy(bs: BranchingState, frag: FragmentSpec) -> float:
    """Entropy in bits of the reduced state on the fragment.

    The marginal acts on the two-dimensional span of the kept branch
    vectors; its 2x2 form in an orthonormalized basis has diagonal weights
    |c0|^2, |c1|^2 and off-diagonal coherence damped by the overlap of the
    traced-out branches.
    """
    frag.validate_within(bs.n_sites)
    if len(frag) == 0 or len(frag) == bs.n_sites:
        return 0.0
    gamma_in = fragment_overlap(bs, frag)
    gamma_out = fragment_overlap(bs, frag.complement(bs.n_sites))
    c0, c1 = bs.weights
    return float(rank_two_entropy_batch(c0, c1, [gamma_in], [gamma_out])[0])


def mutual_information(bs: BranchingState, part_a: FragmentSpec, part_b: FragmentSpec) -> float:
    require_disjoint(part_a, part_b)
    h_a = marginal_entropy(bs, part_a)
    h_b = marginal_entropy(bs, part_b)
    h_ab = marginal_entropy(bs, part_a.union(part_b))
    return h_a + h_b - h_ab


def _orthonormal_pair_coefficients(overlap: complex) -> tuple[np.ndarray, np.ndarray, float]:
    """Coefficients of (branch0, branch1) in a Gram-Schmidt basis of their span.

    overlap is <branch1|branch0>. Returns (coef0, coef1, tau) where tau is
    the orthogonal component of branch1.
    """
    tau = math.sqrt(max(0.0, 1.0 - abs(overlap) ** 2))
    coef0 = np.array([1.0, 0.0], dtype=complex)
    coef1 = np.array([np.conj(overlap), tau], dtype=complex)
    return coef0, coef1, tau


def reduced_pair_state(
    bs: BranchingState, part_a: FragmentSpec, part_b: FragmentSpec
) -> DensityMatrix:
    """Reduced state on two disjoint fragments as an effective two-qubit matrix.

    Each fragment is represented in the orthonormalized two-dimensional span
    of its branch vectors; tracing out the remaining sites multiplies the
    branch coherence by their overlap product. Entropies and correlation
    measures of the true reduced state coincide with those of this 4x4 form.
    """
    require_disjoint(part_a, part_b)
    part_a.validate_within(bs.n_sites)
    part_b.validate_within(bs.n_sites)
    rest = part_a.union(part_b).complement(bs.n_sites)
    gamma_rest = fragment_overlap(bs, rest)
    a0, a1, _ = _orthonormal_pair_coefficients(fragment_overlap(bs, part_a))
    b0, b1, _ = _orthonormal_pair_coefficients(fragment_overlap(bs, part_b))
    v0 = np.kron(a0, b0)
    v1 = np.kron(a1, b1)
    c0, c1 = bs.weights
    rho = (
        abs(c0) ** 2 * np.outer(v0, v0.conj())
        + abs(c1) ** 2 * np.outer(v1, v1.conj())
        + c0 * np.conj(c1) * gamma_rest * np.outer(v0, v1.conj())
        + np.conj(c0) * c1 * np.conj(gamma_rest) * np.outer(v1, v0.conj())
    )
    return DensityMatrix((2, 2), rho, check_psd=False)


def _site_outcome_amplitudes(
    bs: BranchingState, frag: FragmentSpec, bases: Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Per-branch outcome amplitude tables, as kron-expanded vectors."""
    if len(bases) != len(frag):
        raise ValueError("one basis per measured site required")
    t0 = np.array([1.0 + 0j])
    t1 = np.array([1.0 + 0j])
    for site, basis in zip(frag, bases):
        basis = np.asarray(basis, dtype=complex)
        d = bs.sites[site][0].size
        if basis.shape != (d, d):
            raise ValueError(f"site {site}: basis shape {basis.shape} != ({d}, {d})")
        dev = float(np.max(np.abs(basis.conj().T @ basis - np.eye(d))))
        if dev > 1e-10:
            raise ValueError(f"site {site}: non-orthonormal basis (deviation {dev:.3e})")
        v0, v1 = bs.sites[site]
        t0 = np.kron(t0, basis.conj().T @ v0)
        t1 = np.kron(t1, basis.conj().T @ v1)
    return t0, t1


def measured_joint_distribution(
    bs: BranchingState,
    frag_a: FragmentSpec,
    bases_a: Sequence[np.ndarray],
    frag_b: FragmentSpec,
    bases_b: Sequence[np.ndarray],
) -> np.ndarray:
    """Joint outcome probabilities for product measurements on two fragments.

    Returns a table p[x, y] over the outcomes of frag_a and frag_b with all
    other sites left unmeasured. Entries are clipped at 0 and sum to 1.
    """
    require_disjoint(frag_a, frag_b)
    union = frag_a.union(frag_b)
    union.validate_within(bs.n_sites)
    n_a = math.prod(bs.dims[i] for i in frag_a)
    n_b = math.prod(bs.dims[i] for i in frag_b)
    if n_a * n_b > JOINT_OUTCOME_CAP:
        raise ValueError(
            f"joint outcome count {n_a * n_b} exceeds cap {JOINT_OUTCOME_CAP}; "
            "measure smaller fragments"
        )
    a0, a1 = _site_outcome_amplitudes(bs, frag_a, bases_a)
    b0, b1 = _site_outcome_amplitudes(bs, frag_b, bases_b)
    t0 = np.kron(a0, b0)
    t1 = np.kron(a1, b1)
    gamma_rest = fragment_overlap(bs, union.complement(bs.n_sites))
    c0, c1 = bs.weights
    p = (
        abs(c0) ** 2 * np.abs(t0) ** 2
        + abs(c1) ** 2 * np.abs(t1) ** 2
        + 2.0 * (np.conj(c0) * c1 * np.conj(gamma_rest) * np.conj(t0) * t1).real
    )
    p = np.clip(p, 0.0, None)
    return p.reshape(n_a, n_b)
