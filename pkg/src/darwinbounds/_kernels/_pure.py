"""Pure numpy reference implementations of the hot numeric kernels.

Semantics here are authoritative; the compiled backend in ``_core.pyx``
must agree within floating-point noise. Entropy contributions use the
continuous 0*log(0) = 0 convention with no cutoff, so optimizers see a
smooth objective.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def _plogp_sum(lam: np.ndarray) -> np.ndarray:
    """Sum of -lam * log2(lam) over the last axis, zeros passed through."""
    safe = np.where(lam > 0.0, lam, 1.0)
    return -np.sum(np.where(lam > 0.0, lam * np.log2(safe), 0.0), axis=-1)


def _entropy_2x2_batch(a00: np.ndarray, a11: np.ndarray, a01: np.ndarray) -> np.ndarray:
    """Entropy of stacked 2x2 Hermitian matrices [[a00, a01], [conj(a01), a11]]."""
    half_tr = 0.5 * (a00 + a11)
    disc = np.sqrt(0.25 * (a00 - a11) ** 2 + np.abs(a01) ** 2)
    lam = np.stack([np.clip(half_tr - disc, 0.0, None), np.clip(half_tr + disc, 0.0, None)], axis=-1)
    return _plogp_sum(lam)


def measured_mutual_info_batch(rho4: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Mutual information left after measuring the second subsystem.

    rho4 is the joint state reshaped to (d, m, d, m) with the unmeasured
    part first; bases has shape (B, m, m) with measurement vectors as
    columns. Returns, per basis, H(kept) - sum_o p_o H(kept | outcome o)
    in bits. The conditional sum is accumulated as ent(K_o) + p_o log2 p_o
    for the unnormalized outcome blocks K_o, which avoids dividing by small
    probabilities.
    """
    d = rho4.shape[0]
    rho_keep = np.einsum("iaja->ij", rho4)
    h_keep = float(_plogp_sum(np.clip(np.linalg.eigvalsh(rho_keep), 0.0, None)))

    k_blocks = np.einsum("bao,iajc,bco->boij", bases.conj(), rho4, bases, optimize=True)
    probs = np.einsum("boii->bo", k_blocks).real

    if d == 2:
        ent = _entropy_2x2_batch(
            k_blocks[..., 0, 0].real, k_blocks[..., 1, 1].real, k_blocks[..., 0, 1]
        )
    else:
        lam = np.clip(np.linalg.eigvalsh(k_blocks), 0.0, None)
        ent = _plogp_sum(lam)
    safe = probs > 0.0
    p = np.where(safe, probs, 1.0)
    terms = np.where(safe, ent + probs * np.log2(p), 0.0)
    return h_keep - np.sum(terms, axis=1)


def measured_mutual_info(rho4: np.ndarray, basis: np.ndarray) -> float:
    """Single-basis variant of measured_mutual_info_batch."""
    return float(measured_mutual_info_batch(rho4, basis[np.newaxis])[0])


def rank_two_entropy_batch(
    c0: complex, c1: complex, gamma_in: np.ndarray, gamma_out: np.ndarray
) -> np.ndarray:
    """Entropy of a two-branch marginal from kept/traced overlap products.

    The kept fragment carries branch vectors with inner product gamma_in
    (branch1 . branch0); tracing the complement leaves the off-diagonal
    weighted by gamma_out. Works elementwise over equal-shaped arrays.
    """
    gamma_in = np.asarray(gamma_in, dtype=complex)
    gamma_out = np.asarray(gamma_out, dtype=complex)
    w0 = abs(c0) ** 2
    w1 = abs(c1) ** 2
    cross = c0 * np.conj(c1) * gamma_out
    tau_sq = np.clip(1.0 - np.abs(gamma_in) ** 2, 0.0, None)
    tau = np.sqrt(tau_sq)
    a00 = w0 + w1 * np.abs(gamma_in) ** 2 + 2.0 * (cross * gamma_in).real
    a11 = w1 * tau_sq
    a01 = w1 * np.conj(gamma_in) * tau + cross * tau
    return _entropy_2x2_batch(a00, a11, a01)


def rank_two_entropy(c0: complex, c1: complex, gamma_in: complex, gamma_out: complex) -> float:
    return float(rank_two_entropy_batch(c0, c1, np.asarray([gamma_in]), np.asarray([gamma_out]))[0])
