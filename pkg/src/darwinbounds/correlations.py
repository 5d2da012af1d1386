"""Classical correlations, quantum discord, entanglement of formation,
information deficit, and conditional mutual information.

Classical correlations J(kept : measured) are the maximum mutual
information left after a rank-1 projective measurement on the measured
side. Three routes are available:

* rank-two exact: when the joint state has rank <= 2 and the kept side is
  (effectively) a qubit, J follows exactly from a two-dimensional
  purification and the two-qubit concurrence, with no optimization;
* zoom grid: deterministic Bloch-sphere grid search with refinement for
  single-qubit measured fragments (the independent oracle);
* optimizer: multi-start Nelder-Mead over parameterized measurement bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize

from . import branching as br
from ._kernels import measured_mutual_info, measured_mutual_info_batch
from .qstate import (
    DensityMatrix,
    FragmentSpec,
    PureState,
    binary_entropy,
    entropy_of_spectrum,
    require_disjoint,
)
from . import qstate as qs

Universe = Union[PureState, br.BranchingState]

RANK_TOL = 1e-10
DEGENERATE_ENTROPY = 1e-9

_SIGMA_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


# ---------------------------------------------------------------------------
# measurements


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete rank-1 projective measurement on a fragment.

    Either one orthonormal basis of the full fragment space (columns of a
    unitary) or one basis per site for product measurements.
    """

    full_basis: Optional[np.ndarray] = None
    site_bases: Optional[tuple[np.ndarray, ...]] = None

    def __post_init__(self):
        if (self.full_basis is None) == (self.site_bases is None):
            raise ValueError("provide exactly one of full_basis or site_bases")
        for mat in self._matrices():
            mat = np.asarray(mat, dtype=complex)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("measurement basis must be a square matrix of columns")
            dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))
            if dev > 1e-10:
                raise ValueError(f"basis not orthonormal/complete (deviation {dev:.3e})")

    def _matrices(self):
        if self.full_basis is not None:
            return (np.asarray(self.full_basis),)
        return tuple(np.asarray(b) for b in self.site_bases)

    def matrix(self) -> np.ndarray:
        """The measurement basis as one unitary on the fragment space."""
        if self.full_basis is not None:
            return np.asarray(self.full_basis, dtype=complex)
        out = np.array([[1.0 + 0j]])
        for b in self.site_bases:
            out = np.kron(out, np.asarray(b, dtype=complex))
        return out

    @staticmethod
    def computational(dim: int) -> "ProjectiveMeasurement":
        return ProjectiveMeasurement(full_basis=np.eye(dim, dtype=complex))

    @staticmethod
    def qubit(theta: float, phi: float) -> "ProjectiveMeasurement":
        return ProjectiveMeasurement(full_basis=_qubit_basis(theta, phi))


def _qubit_basis(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -s * e.conjugate()], [s * e, c]], dtype=complex)


def _qubit_basis_batch(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    c, s = np.cos(thetas / 2.0), np.sin(thetas / 2.0)
    e = np.exp(1j * phis)
    out = np.empty(thetas.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s * e.conj()
    out[..., 1, 0] = s * e
    out[..., 1, 1] = c
    return out


def _hermitian_from_params(params: np.ndarray, m: int) -> np.ndarray:
    h = np.zeros((m, m), dtype=complex)
    h[np.diag_indices(m)] = params[:m]
    k = m
    for i in range(m):
        for j in range(i + 1, m):
            h[i, j] = params[k] + 1j * params[k + 1]
            h[j, i] = params[k] - 1j * params[k + 1]
            k += 2
    return h


def _full_basis_from_params(params: np.ndarray, m: int) -> np.ndarray:
    w, v = np.linalg.eigh(_hermitian_from_params(params, m))
    return (v * np.exp(1j * w)) @ v.conj().T


def _product_basis_from_params(params: np.ndarray, n_sites: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for s in range(n_sites):
        out = np.kron(out, _qubit_basis(params[2 * s], params[2 * s + 1]))
    return out


def post_measurement_state(
    dm: DensityMatrix, meas: ProjectiveMeasurement, measured_side: FragmentSpec
) -> DensityMatrix:
    """Dephase the measured side in the measurement basis."""
    measured_side.validate_within(dm.n_sites)
    if len(measured_side) == 0:
        raise ValueError("measured side must be nonempty")
    d_m = math.prod(dm.dims[i] for i in measured_side)
    basis = meas.matrix()
    if basis.shape != (d_m, d_m):
        raise ValueError(
            f"incomplete measurement set: basis covers dimension {basis.shape[0]}, "
            f"fragment has {d_m}"
        )
    rho4, _, m, perm = _reorder_keep_first(dm, measured_side)
    rotated = np.einsum("am,iajb,bn->imjn", basis.conj(), rho4, basis, optimize=True)
    idx = np.arange(m)
    diag = np.zeros_like(rotated)
    diag[:, idx, :, idx] = rotated[:, idx, :, idx]
    back = np.einsum("am,imjn,bn->iajb", basis, diag, basis.conj(), optimize=True)
    out = _restore_order(back, dm.dims, perm)
    return DensityMatrix(dm.dims, out, check_psd=False)


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the measurement search."""

    restarts: int = 32
    grid_resolution: int = 64
    seed: int = 7
    method: str = "auto"  # auto | exact | grid | optimizer
    measurement: str = "auto"  # auto | full | product
    full_dim_limit: int = 8
    maxfev_per_param: int = 400
    fatol: float = 1e-12
    xatol: float = 1e-9

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


DEFAULT_CONFIG = OptimizerConfig()


@dataclass(frozen=True)
class CorrelationReport:
    """Correlation values for one kept/measured split with provenance."""

    mutual_info: float
    classical_J: float
    discord_D: float
    method: str  # rank-two-exact | grid-oracle | optimizer
    argmax_basis: Optional[ProjectiveMeasurement] = None
    restarts_used: int = 0
    convergence_slack: float = 0.0

    def __post_init__(self):
        if abs(self.discord_D - (self.mutual_info - self.classical_J)) > 1e-12:
            raise ValueError("discord must equal mutual_info - classical_J")
        if not -1e-9 <= self.classical_J <= self.mutual_info + 1e-9:
            raise ValueError(
                f"classical correlations {self.classical_J} outside "
                f"[0, {self.mutual_info}]"
            )

    @property
    def exact(self) -> bool:
        return self.method == "rank-two-exact"


@dataclass(frozen=True)
class DeficitReport:
    per_site_deltas: tuple[float, ...]
    average_delta: float
    H_S: float
    degenerate: bool = False

    def __post_init__(self):
        if any(not -1e-9 <= d <= 1.0 + 1e-9 for d in self.per_site_deltas):
            raise ValueError("per-site deficits must lie in [0, 1]")
        if abs(self.average_delta - float(np.mean(self.per_site_deltas))) > 1e-12:
            raise ValueError("average deficit inconsistent with the per-site list")


# ---------------------------------------------------------------------------
# index plumbing


def _reorder_keep_first(dm: DensityMatrix, measured: FragmentSpec):
    n = dm.n_sites
    keep = [i for i in range(n) if i not in measured]
    perm = keep + list(measured)
    dims = dm.dims
    d_keep = math.prod(dims[i] for i in keep) if keep else 1
    m = math.prod(dims[i] for i in measured)
    tensor = dm.matrix.reshape(dims + dims)
    tensor = np.transpose(tensor, perm + [p + n for p in perm])
    rho4 = np.ascontiguousarray(tensor.reshape(d_keep, m, d_keep, m))
    return rho4, d_keep, m, perm


def _restore_order(rho4: np.ndarray, dims: tuple[int, ...], perm: list[int]) -> np.ndarray:
    n = len(dims)
    permuted_dims = tuple(dims[p] for p in perm)
    tensor = rho4.reshape(permuted_dims + permuted_dims)
    inverse = [int(i) for i in np.argsort(perm)]
    tensor = np.transpose(tensor, inverse + [i + n for i in inverse])
    side = math.prod(dims)
    return tensor.reshape(side, side)


def _keep_marginal(rho4: np.ndarray) -> np.ndarray:
    return np.einsum("iaja->ij", rho4)


# ---------------------------------------------------------------------------
# two-qubit entanglement


def _concurrence_matrix(rho: np.ndarray) -> float:
    # With rho = Phi Phi^dagger, the spin-flip spectrum equals the singular
    # values of the symmetric matrix Phi^T (sy x sy) Phi; SVD keeps this
    # well-conditioned where eigvals of rho * rho_tilde is not.
    w, v = np.linalg.eigh(rho)
    phi = v * np.sqrt(np.clip(w, 0.0, None))
    lam = np.linalg.svd(phi.T @ _SIGMA_YY @ phi, compute_uv=False)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def concurrence(dm: DensityMatrix) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    if dm.dims != (2, 2):
        raise ValueError(f"concurrence requires a two-qubit state, got dims {dm.dims}")
    return _concurrence_matrix(dm.matrix)


def _eof_from_concurrence(c: float) -> float:
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c))))


def eof_two_qubit(dm: DensityMatrix) -> float:
    """Entanglement of formation of a two-qubit state, in bits."""
    return _eof_from_concurrence(concurrence(dm))


# ---------------------------------------------------------------------------
# exact rank-two route


def _project_side(rho4: np.ndarray, side: int, tol: float = RANK_TOL):
    """Project one side of a bipartite rho4 onto its support if rank <= 2."""
    d = rho4.shape[side]
    if d == 2:
        return rho4
    if d == 1:
        pad = np.zeros((1, 2), dtype=complex)
        pad[0, 0] = 1.0
        proj = pad
    else:
        marg = np.einsum("abcb->ac", rho4) if side == 0 else np.einsum("abad->bd", rho4)
        w, v = np.linalg.eigh(marg)
        if w[-3] > tol:
            return None
        proj = v[:, -2:]
    if side == 0:
        return np.einsum("ai,abcd,cj->ibjd", proj.conj(), rho4, proj, optimize=True)
    return np.einsum("bi,abcd,dj->aicj", proj.conj(), rho4, proj, optimize=True)


def _as_two_qubit(rho: np.ndarray, d_a: int, d_b: int, tol: float = RANK_TOL):
    """Both sides projected onto (at most two-dimensional) supports, or None."""
    rho4 = rho.reshape(d_a, d_b, d_a, d_b)
    for side in (0, 1):
        rho4 = _project_side(rho4, side, tol)
        if rho4 is None:
            return None
    out = rho4.reshape(4, 4)
    tr = float(np.trace(out).real)
    if tr < 1e-14:
        return None
    return out / tr


def _rank_two_exact_j(rho4: np.ndarray, d_keep: int, m: int, tol: float = RANK_TOL):
    """Exact classical correlations via a two-dimensional purification.

    Requires the joint state to have rank <= 2 and the kept side support to
    fit in two dimensions. The purifying ancilla then forms a two-qubit
    state with the kept side, whose entanglement of formation fixes J
    through the saturated trade-off J = H(kept) - E_f(kept : ancilla).
    """
    total = d_keep * m
    rho = rho4.reshape(total, total)
    w, v = np.linalg.eigh(rho)
    if total > 2 and w[-3] > tol:
        return None
    rho_keep = _keep_marginal(rho4)
    keep_spectrum = np.linalg.eigvalsh(rho_keep)
    if d_keep > 2 and keep_spectrum[-3] > tol:
        return None
    h_keep = entropy_of_spectrum(keep_spectrum)

    lam = np.clip(w[-2:], 0.0, None)
    lam = lam / lam.sum()
    vecs = v[:, -2:].reshape(d_keep, m, 2)
    psi = vecs * np.sqrt(lam)[np.newaxis, np.newaxis, :]
    rho_kr = np.einsum("afr,bfs->arbs", psi, psi.conj(), optimize=True)
    two_qubit = _as_two_qubit(rho_kr.reshape(2 * d_keep, 2 * d_keep), d_keep, 2, tol)
    if two_qubit is None:
        return None
    eof = _eof_from_concurrence(_concurrence_matrix(two_qubit))
    return max(h_keep - eof, 0.0)


# ---------------------------------------------------------------------------
# grid oracle and optimizer


def _zoom_grid(rho4: np.ndarray, resolution: int, rounds: int = 4):
    """Deterministic grid search with refinement over qubit measurement angles."""
    theta_c, theta_span = 0.5 * math.pi, math.pi
    phi_c, phi_span = math.pi, 2.0 * math.pi
    best_val, best_theta, best_phi = -np.inf, 0.0, 0.0
    for _ in range(rounds):
        thetas = np.linspace(theta_c - theta_span / 2, theta_c + theta_span / 2, resolution)
        phis = np.linspace(phi_c - phi_span / 2, phi_c + phi_span / 2, resolution)
        tt, pp = np.meshgrid(thetas, phis, indexing="ij")
        bases = _qubit_basis_batch(tt.ravel(), pp.ravel())
        vals = measured_mutual_info_batch(rho4, bases)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_theta = float(tt.ravel()[k])
            best_phi = float(pp.ravel()[k])
        theta_c, phi_c = best_theta, best_phi
        theta_span = 4.0 * theta_span / resolution
        phi_span = 4.0 * phi_span / resolution
    return best_val, best_theta, best_phi


def classical_correlations_grid_oracle(
    dm: DensityMatrix, measured: FragmentSpec, grid_resolution: int = 64
) -> float:
    """Exhaustive Bloch-sphere grid (with refinement) for a single-qubit fragment."""
    measured.validate_within(dm.n_sites)
    m = math.prod(dm.dims[i] for i in measured)
    if m != 2:
        raise ValueError("grid oracle requires a single-qubit measured fragment")
    rho4, _, _, _ = _reorder_keep_first(dm, measured)
    best_val, _, _ = _zoom_grid(rho4, grid_resolution)
    return best_val


def _multistart_maximize(objective, n_params, starts, config: OptimizerConfig):
    """Nelder-Mead from each start; returns results sorted best-first."""
    maxfev = config.maxfev_per_param * max(n_params, 2)
    results = []
    for i, x0 in enumerate(starts):
        res = minimize(
            lambda x: -objective(x),
            x0,
            method="Nelder-Mead",
            options={
                "fatol": config.fatol,
                "xatol": config.xatol,
                "maxfev": maxfev,
                "maxiter": maxfev,
            },
        )
        results.append((-float(res.fun), i, np.asarray(res.x)))
    results.sort(key=lambda t: (-t[0], t[1]))
    return results


def _optimize_measurement(rho4, measured_dims, config: OptimizerConfig):
    """Multi-start search over measurement bases; returns (J, basis, slack, restarts)."""
    m = int(np.prod(measured_dims))
    style = config.measurement
    if style == "auto":
        style = "full" if m <= config.full_dim_limit else "product"
    if style == "product" and any(d != 2 for d in measured_dims):
        raise ValueError("product measurement search supports qubit sites only")

    if style == "full" and m == 2:
        n_params = 2
        build = lambda x: _qubit_basis(x[0], x[1])
        spans = np.array([math.pi, 2.0 * math.pi])
    elif style == "full":
        n_params = m * m
        build = lambda x: _full_basis_from_params(x, m)
        spans = np.full(n_params, math.pi)
    else:
        n_sites = len(measured_dims)
        n_params = 2 * n_sites
        build = lambda x: _product_basis_from_params(x, n_sites)
        spans = np.tile([math.pi, 2.0 * math.pi], n_sites)

    rng = config.rng()
    starts = [np.zeros(n_params)]
    starts += [rng.uniform(0.0, 1.0, n_params) * spans for _ in range(config.restarts - 1)]

    def objective(x):
        return measured_mutual_info(rho4, build(x))

    results = _multistart_maximize(objective, n_params, starts, config)
    top = [val for val, _, _ in results[:5]]
    slack = (top[0] - top[-1]) if len(top) > 1 else 0.0
    best_val, _, best_x = results[0]
    if style == "product":
        sites = tuple(
            _qubit_basis(best_x[2 * s], best_x[2 * s + 1]) for s in range(len(measured_dims))
        )
        basis = ProjectiveMeasurement(site_bases=sites)
    else:
        basis = ProjectiveMeasurement(full_basis=build(best_x))
    return best_val, basis, slack, len(starts)


# ---------------------------------------------------------------------------
# public correlation operations


def classical_correlations(
    dm: DensityMatrix, measured: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> CorrelationReport:
    """Maximal information about the kept side extractable by measuring the fragment.

    The rank-two route is exact; the grid and optimizer routes return the
    best value found (a certified lower bound on the true maximum).
    """
    measured.validate_within(dm.n_sites)
    if len(measured) == 0:
        raise ValueError("measured fragment must be nonempty")
    if len(measured) == dm.n_sites:
        raise ValueError("measured fragment covers the whole state; nothing left to correlate")

    keep = measured.complement(dm.n_sites)
    info = qs.mutual_information(dm, keep, measured)
    rho4, d_keep, m, _ = _reorder_keep_first(dm, measured)

    if config.method in ("auto", "exact"):
        j_exact = _rank_two_exact_j(rho4, d_keep, m)
        if j_exact is not None:
            return CorrelationReport(
                mutual_info=info,
                classical_J=j_exact,
                discord_D=info - j_exact,
                method="rank-two-exact",
            )
        if config.method == "exact":
            raise ValueError("rank-two exact route not applicable to this state")

    if config.method == "grid" or (config.method == "auto" and m == 2):
        if m != 2:
            raise ValueError("grid route requires a single-qubit measured fragment")
        grid_val, theta, phi = _zoom_grid(rho4, config.grid_resolution)
        polish = _multistart_maximize(
            lambda x: measured_mutual_info(rho4, _qubit_basis(x[0], x[1])),
            2,
            [np.array([theta, phi])],
            config,
        )
        j_val, _, best_x = polish[0]
        if grid_val >= j_val:
            j_val, best_x = grid_val, np.array([theta, phi])
        return CorrelationReport(
            mutual_info=info,
            classical_J=j_val,
            discord_D=info - j_val,
            method="grid-oracle",
            argmax_basis=ProjectiveMeasurement.qubit(best_x[0], best_x[1]),
            restarts_used=1,
            convergence_slack=abs(j_val - grid_val),
        )

    measured_dims = tuple(dm.dims[i] for i in measured)
    j_val, basis, slack, used = _optimize_measurement(rho4, measured_dims, config)
    return CorrelationReport(
        mutual_info=info,
        classical_J=j_val,
        discord_D=info - j_val,
        method="optimizer",
        argmax_basis=basis,
        restarts_used=used,
        convergence_slack=slack,
    )


def discord(
    dm: DensityMatrix, measured: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> CorrelationReport:
    """Pre- minus post-measurement mutual information (report carries both)."""
    return classical_correlations(dm, measured, config)


# ---------------------------------------------------------------------------
# universes: entropies and reduced pair states


def universe_entropy(universe: Universe, sites: FragmentSpec) -> float:
    if isinstance(universe, br.BranchingState):
        return br.marginal_entropy(universe, sites)
    return qs.schmidt_entropy(universe, sites)


def universe_mutual_information(
    universe: Universe, part_a: FragmentSpec, part_b: FragmentSpec
) -> float:
    if isinstance(universe, br.BranchingState):
        return br.mutual_information(universe, part_a, part_b)
    return qs.mutual_information(universe, part_a, part_b)


def n_sites_of(universe: Universe) -> int:
    return universe.n_sites


def pair_state(
    universe: Universe, part_a: FragmentSpec, part_b: FragmentSpec
) -> tuple[DensityMatrix, FragmentSpec]:
    """Reduced state on two disjoint fragments plus the positions of part_b.

    For branching universes the state is the exact effective two-qubit
    reduction; for dense universes it is the literal partial trace, which
    requires every part_a index to precede every part_b index.
    """
    require_disjoint(part_a, part_b)
    if isinstance(universe, br.BranchingState):
        return br.reduced_pair_state(universe, part_a, part_b), FragmentSpec([1])
    if max(part_a.indices) > min(part_b.indices):
        raise ValueError("part_a indices must precede part_b indices for dense reduction")
    dm = qs.partial_trace(universe, part_a.union(part_b))
    measured = FragmentSpec(range(len(part_a), len(part_a) + len(part_b)))
    return dm, measured


def pair_state_dense(
    universe: Universe, frag: FragmentSpec
) -> tuple[DensityMatrix, FragmentSpec]:
    """Literal reduced state on the system plus a fragment, with the fragment
    sites kept distinct (needed for product measurements). Branching
    universes are materialized, so this requires dense-cap sizes."""
    if 0 in frag:
        raise ValueError("fragment must not contain the system site")
    dense = br.to_dense(universe) if isinstance(universe, br.BranchingState) else universe
    dm = qs.partial_trace(dense, FragmentSpec([0]).union(frag))
    measured = FragmentSpec(range(1, 1 + len(frag)))
    return dm, measured


def fragment_report(
    universe: Universe, frag: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> CorrelationReport:
    """Correlations between the system (site 0) and a measured environment fragment."""
    if 0 in frag:
        raise ValueError("fragment must not contain the system site")
    dm, measured = pair_state(universe, FragmentSpec([0]), frag)
    return classical_correlations(dm, measured, config)


def system_measured_report(
    universe: Universe, frag: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> CorrelationReport:
    """Correlations with the measurement on the system side instead."""
    if 0 in frag:
        raise ValueError("fragment must not contain the system site")
    dm, _ = pair_state(universe, FragmentSpec([0]), frag)
    measured = FragmentSpec([0])
    return classical_correlations(dm, measured, config)


# ---------------------------------------------------------------------------
# entanglement of formation through the trade-off relation


def eof_koashi_winter(
    universe: Universe, target: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> float:
    """E_f between the system and a fragment of a pure universe.

    Exact whenever the target support fits in two dimensions (always true
    for branching universes and single-site targets): the reduced pair
    state is then two-qubit-equivalent and the concurrence applies. This
    equals H(S) minus the classical correlations readable from the rest of
    the environment. Falls back to the measurement optimizer on the
    complement when the support condition fails.
    """
    if 0 in target:
        raise ValueError("target must not contain the system site")
    n = n_sites_of(universe)
    target.validate_within(n)
    if len(target) == 0:
        raise ValueError("target must be nonempty")

    if isinstance(universe, br.BranchingState):
        dm, _ = pair_state(universe, FragmentSpec([0]), target)
        return eof_two_qubit(dm)

    dm = qs.partial_trace(universe, FragmentSpec([0]).union(target))
    d_a = dm.dims[0]
    d_b = math.prod(dm.dims[1:])
    two_qubit = _as_two_qubit(dm.matrix, d_a, d_b)
    if two_qubit is not None:
        return _eof_from_concurrence(_concurrence_matrix(two_qubit))

    # support condition failed: approximate via the complementary fragment
    h_s = universe_entropy(universe, FragmentSpec([0]))
    rest = FragmentSpec([i for i in range(1, n) if i not in target])
    if len(rest) == 0:
        return h_s
    j_rest = fragment_report(universe, rest, config).classical_J
    return max(h_s - j_rest, 0.0)


# ---------------------------------------------------------------------------
# conditional mutual information and the information deficit


def conditional_mutual_information(
    universe: Universe, s: FragmentSpec, f_k: FragmentSpec, f_l: FragmentSpec
) -> float:
    """Information gained about s when enlarging the fragment f_k by f_l."""
    require_disjoint(s, f_k, f_l)
    big = universe_mutual_information(universe, s, f_k.union(f_l))
    small = universe_mutual_information(universe, s, f_k)
    return big - small


def information_deficit(
    universe: Universe, frag: FragmentSpec, config: OptimizerConfig = DEFAULT_CONFIG
) -> float:
    """Normalized disagreement between the fragment and its complement.

    Zero when both the fragment and the rest of the environment carry the
    full classical record about the system; returns 0 with no broadcastable
    information when H(S) vanishes.
    """
    if 0 in frag:
        raise ValueError("fragment must not contain the system site")
    n = n_sites_of(universe)
    frag.validate_within(n)
    h_s = universe_entropy(universe, FragmentSpec([0]))
    if h_s < DEGENERATE_ENTROPY:
        return 0.0
    comp = FragmentSpec([i for i in range(1, n) if i not in frag])
    j_frag = fragment_report(universe, frag, config).classical_J
    # an empty complement carries no record at all
    j_comp = fragment_report(universe, comp, config).classical_J if len(comp) else 0.0
    delta = (h_s - min(j_frag, j_comp)) / h_s
    return float(min(max(delta, 0.0), 1.0))


def deficit_report(
    universe: Universe, config: OptimizerConfig = DEFAULT_CONFIG
) -> DeficitReport:
    """Per-site information deficits and their average."""
    n = n_sites_of(universe)
    h_s = universe_entropy(universe, FragmentSpec([0]))
    if h_s < DEGENERATE_ENTROPY:
        zeros = tuple(0.0 for _ in range(1, n))
        return DeficitReport(zeros, 0.0, h_s, degenerate=True)
    if isinstance(universe, br.BranchingState) and universe.symmetric:
        d1 = information_deficit(universe, FragmentSpec([1]), config)
        deltas = tuple(d1 for _ in range(1, n))
    else:
        deltas = tuple(
            information_deficit(universe, FragmentSpec([i]), config) for i in range(1, n)
        )
    return DeficitReport(deltas, float(np.mean(deltas)), h_s)
