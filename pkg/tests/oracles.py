"""Independent brute-force references used to pin expected test values.

Everything here works by explicit index summation or full projector
enumeration, deliberately avoiding the package's own code paths.
"""

import itertools
import math

import numpy as np


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace_loops(rho, dims, keep):
    """Reduced matrix by literal index summation."""
    keep = list(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kept_dims = [dims[i] for i in keep]
    d_keep = int(np.prod(kept_dims))
    out = np.zeros((d_keep, d_keep), dtype=complex)
    kept_ranges = [range(d) for d in kept_dims]
    traced_ranges = [range(dims[i]) for i in traced]

    def flat(assign):
        idx = 0
        for i, d in enumerate(dims):
            idx = idx * d + assign[i]
        return idx

    for row_kept in itertools.product(*kept_ranges):
        for col_kept in itertools.product(*kept_ranges):
            total = 0.0 + 0j
            for tr in itertools.product(*traced_ranges):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, site in enumerate(keep):
                    row[site] = row_kept[pos]
                    col[site] = col_kept[pos]
                for pos, site in enumerate(traced):
                    row[site] = tr[pos]
                    col[site] = tr[pos]
                total += rho[flat(row), flat(col)]
            r = 0
            for v, d in zip(row_kept, kept_dims):
                r = r * d + v
            c = 0
            for v, d in zip(col_kept, kept_dims):
                c = c * d + v
            out[r, c] = total
    return out


def entropy_eig(rho):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log2(lam)))


def mutual_information_direct(rho, dims, part_a, part_b):
    ra = partial_trace_loops(rho, dims, part_a)
    rb = partial_trace_loops(rho, dims, part_b)
    rab = partial_trace_loops(rho, dims, sorted(list(part_a) + list(part_b)))
    return entropy_eig(ra) + entropy_eig(rb) - entropy_eig(rab)


def embed_projector(vecs, sites, dims):
    """Projector onto a product vector of some sites, identity elsewhere."""
    mats = []
    for i, d in enumerate(dims):
        if i in sites:
            v = vecs[sites.index(i)]
            mats.append(np.outer(v, v.conj()))
        else:
            mats.append(np.eye(d))
    return kron_all(mats)


def born_joint_distribution(amps, dims, frag_a, bases_a, frag_b, bases_b):
    """Outcome table by full projector enumeration."""
    n_a = int(np.prod([dims[i] for i in frag_a]))
    n_b = int(np.prod([dims[i] for i in frag_b]))
    table = np.zeros((n_a, n_b))
    ranges_a = [range(dims[i]) for i in frag_a]
    ranges_b = [range(dims[i]) for i in frag_b]
    for xa in itertools.product(*ranges_a):
        for xb in itertools.product(*ranges_b):
            vecs_a = [np.asarray(bases_a[k])[:, xa[k]] for k in range(len(frag_a))]
            vecs_b = [np.asarray(bases_b[k])[:, xb[k]] for k in range(len(frag_b))]
            proj = embed_projector(vecs_a + vecs_b, list(frag_a) + list(frag_b), dims)
            p = np.vdot(amps, proj @ amps).real
            ia = 0
            for v, i in zip(xa, frag_a):
                ia = ia * dims[i] + v
            ib = 0
            for v, i in zip(xb, frag_b):
                ib = ib * dims[i] + v
            table[ia, ib] = p
    return table


def post_measurement_direct(rho, dims, measured, basis):
    """Sum over embedded rank-1 projector conjugations.

    Measured sites must be contiguous so the full-fragment projector can be
    placed as one Kronecker factor.
    """
    measured = list(measured)
    assert measured == list(range(measured[0], measured[0] + len(measured)))
    d_m = int(np.prod([dims[i] for i in measured]))
    out = np.zeros_like(rho)
    for alpha in range(d_m):
        v = np.asarray(basis)[:, alpha]
        proj_m = np.outer(v, v.conj())
        mats = []
        for i, d in enumerate(dims):
            if i == measured[0]:
                mats.append(proj_m)
            elif i in measured:
                continue
            else:
                mats.append(np.eye(d))
        out += kron_all(mats) @ rho @ kron_all(mats)
    return out


def holevo_direct(rho, dims, measured, basis):
    """Post-measurement mutual information by direct matrix arithmetic."""
    after = post_measurement_direct(rho, dims, measured, basis)
    keep = [i for i in range(len(dims)) if i not in measured]
    return mutual_information_direct(after, dims, keep, list(measured))


def shannon_mi(table):
    p = np.asarray(table, dtype=float)
    p = p / p.sum()
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    total = 0.0
    for i in range(p.shape[0]):
        for j in range(p.shape[1]):
            if p[i, j] > 1e-15:
                total += p[i, j] * math.log2(p[i, j] / (px[i] * py[j]))
    return total
