"""State families: the controlled-coupling circuit with its analytic
correlation formulas, GHZ states, random branching states, and Haar-random
pure states.

All sampling goes through numpy's PCG64 generator with an explicit seed;
the draw order is documented on each sampler so streams stay reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qstate as qs
from .branching import BranchingState, make_branching
from .qstate import FragmentSpec, PureState, overlap_entropy


def generator(seed: int) -> np.random.Generator:
    """The package RNG: PCG64 seeded explicitly, never global state."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CMaybeParams:
    """Coupling strength and environment size for the controlled circuit."""

    a: float
    n_env: int

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"coupling a={self.a} outside [0, 1]")
        if self.n_env < 1:
            raise ValueError("n_env must be at least 1")


@dataclass(frozen=True)
class ClosedFormValues:
    """Analytic single-site correlation values for the controlled circuit."""

    H_S: float
    H_eps: float
    J_bar: float
    D_bar: float
    delta: float


def cmaybe_gate(a: float) -> np.ndarray:
    """Two-qubit controlled gate: identity on control 0, a reflection mixing
    the target by angle arccos(a) on control 1."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"coupling a={a} outside [0, 1]")
    b = math.sqrt(1.0 - a * a)
    gate = np.eye(4, dtype=complex)
    gate[2:, 2:] = np.array([[a, b], [b, -a]])
    return gate


def cmaybe_universe(params: CMaybeParams) -> BranchingState:
    """Branching form of the circuit output on |+>|0...0>.

    Branch 0 carries the control in |0> with untouched environment qubits;
    branch 1 carries |1> with every environment qubit rotated to
    (a, sqrt(1-a^2)).
    """
    b = math.sqrt(1.0 - params.a * params.a)
    zero = np.array([1.0, 0.0], dtype=complex)
    one = np.array([0.0, 1.0], dtype=complex)
    kicked = np.array([params.a, b], dtype=complex)
    sites = [(zero, one)] + [(zero, kicked)] * params.n_env
    w = 1.0 / math.sqrt(2.0)
    return make_branching((w, w), sites, symmetric=True)


def cmaybe_universe_dense(params: CMaybeParams) -> PureState:
    """Gate-by-gate dense circuit; the independent oracle for the branching form."""
    n = params.n_env
    plus = PureState((2,), np.array([1.0, 1.0]) / math.sqrt(2.0))
    zero = PureState((2,), np.array([1.0, 0.0]))
    state = qs.tensor_product([plus] + [zero] * n)
    gate = cmaybe_gate(params.a)
    for i in range(1, n + 1):
        state = qs.apply_unitary(state, gate, FragmentSpec([0, i]))
    return state


def closed_forms(params: CMaybeParams) -> ClosedFormValues:
    """Analytic values for one environment qubit of the controlled circuit.

    Uses h(x) = entropy of the spectrum ((1-x)/2, (1+x)/2):
    H_S = h(a^N), H_eps = h(a), J = h(a^N) - h(sqrt(a^2N - a^2 + 1)),
    D = h(a) - h(a^(N-1)) + h(sqrt(a^2N - a^2 + 1)), delta = h(sqrt(...)) / H_S
    with delta = 0 when H_S degenerates.
    """
    a, n = params.a, params.n_env
    h_s = overlap_entropy(a**n)
    h_eps = overlap_entropy(a)
    root = math.sqrt(max(0.0, a ** (2 * n) - a * a + 1.0))
    h_root = overlap_entropy(root)
    j_bar = h_s - h_root
    d_bar = h_eps - overlap_entropy(a ** (n - 1)) + h_root
    delta = h_root / h_s if h_s > 1e-12 else 0.0
    return ClosedFormValues(h_s, h_eps, j_bar, d_bar, delta)


def ghz(n_total: int) -> BranchingState:
    """Equal superposition of all-zero and all-one branches on n_total qubits."""
    if n_total < 2:
        raise ValueError("ghz needs at least two qubits")
    zero = np.array([1.0, 0.0], dtype=complex)
    one = np.array([0.0, 1.0], dtype=complex)
    w = 1.0 / math.sqrt(2.0)
    return make_branching((w, w), [(zero, one)] * n_total, symmetric=True)


def haar_random_pure(dims, seed: int) -> PureState:
    """Haar-random pure state over the given subsystem dimensions.

    Stream: one standard_normal draw of length 2 * total, interleaved as
    (real, imag) per amplitude, then normalized.
    """
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    if total > qs.DENSE_CAP:
        raise ValueError(f"total dimension {total} exceeds dense cap {qs.DENSE_CAP}")
    rng = generator(seed)
    x = rng.standard_normal(2 * total)
    amps = x[0::2] + 1j * x[1::2]
    amps /= np.linalg.norm(amps)
    return PureState(dims, amps)


def _haar_qubit(rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(4)
    v = np.array([x[0] + 1j * x[1], x[2] + 1j * x[3]])
    return v / np.linalg.norm(v)


def random_branching(n_env: int, seed: int, weight_spec: str | tuple = "equal") -> BranchingState:
    """Random two-branch universe with Haar-random per-site qubit branches.

    Stream: per site 0..n_env, branch 0 then branch 1, each one 4-draw Haar
    qubit; with weight_spec="random", two more draws set the weight mix.
    weight_spec may also be an explicit (c0, c1) pair.
    """
    if n_env < 2:
        raise ValueError("random_branching needs at least two environment sites")
    rng = generator(seed)
    sites = [(_haar_qubit(rng), _haar_qubit(rng)) for _ in range(n_env + 1)]
    if weight_spec == "equal":
        w = 1.0 / math.sqrt(2.0)
        weights = (w, w)
    elif weight_spec == "random":
        x = rng.uniform(0.2, 0.8)
        weights = (math.sqrt(x), math.sqrt(1.0 - x))
    else:
        weights = (complex(weight_spec[0]), complex(weight_spec[1]))
    return make_branching(weights, sites, renormalize=True)
