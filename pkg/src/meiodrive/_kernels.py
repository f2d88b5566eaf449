"""Compiled cores: RNG, sum tree, event loops, RK4, random walks.

All randomness comes from the same counter-based splitmix64 stream as
:mod:`meiodrive.rng`; kernels take (seed, pos) and return the advanced pos so
callers can interleave Python-side and kernel-side draws deterministically.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# status codes returned by the event loops
RAN_TO_END = 0
FROZEN = 1

_REBUILD_EVERY = 1 << 24  # guard against float drift in the sum tree


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _u01(seed, pos):
    pos += 1
    z = _mix64(seed + U64(pos) * _GAMMA)
    return (z >> U64(11)) * _INV53, pos


# ---------------------------------------------------------------------------
# Fenwick (binary indexed) tree over per-site total rates
# ---------------------------------------------------------------------------

@njit(cache=True)
def _fw_build(vals, tree):
    n = vals.shape[0]
    for i in range(n + 1):
        tree[i] = 0.0
    for i in range(n):
        j = i + 1
        tree[j] += vals[i]
        k = j + (j & (-j))
        if k <= n:
            tree[k] += tree[j]


@njit(cache=True, inline="always")
def _fw_add(tree, n, i, delta):
    j = i + 1
    while j <= n:
        tree[j] += delta
        j += j & (-j)


@njit(cache=True, inline="always")
def _fw_find(tree, n, u):
    # largest index with prefix sum <= u; returns a 0-based site index
    pos = 0
    bit = 1
    while (bit << 1) <= n:
        bit <<= 1
    rem = u
    while bit > 0:
        nxt = pos + bit
        if nxt <= n and tree[nxt] <= rem:
            rem -= tree[nxt]
            pos = nxt
        bit >>= 1
    if pos >= n:
        pos = n - 1
    return pos


# ---------------------------------------------------------------------------
# Genotype-process Gillespie engine
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _counts(geno, nbr, ext, i):
    # ext: per-face exterior genotypes; face of a negative entry j is -j-1
    n0 = 0
    n1 = 0
    n2 = 0
    for k in range(nbr.shape[1]):
        j = nbr[i, k]
        g = ext[-j - 1] if j < 0 else geno[j]
        if g == 0:
            n0 += 1
        elif g == 1:
            n1 += 1
        else:
            n2 += 1
    return n0, n1, n2


@njit(cache=True, inline="always")
def _channels(g, n0, n1, n2, paa, pab, pba, pbb):
    # (rate1, target1, rate2, target2); unused slots carry rate 0
    if g == 0:
        return 2.0 * pbb * n2 + pba * n1, 1, 0.0, 1
    elif g == 2:
        return 2.0 * paa * n0 + pab * n1, 1, 0.0, 1
    else:
        return (paa * n0 + 0.5 * pab * n1, 0,
                pbb * n2 + 0.5 * pba * n1, 2)


@njit(cache=True, inline="always")
def _site_total(geno, nbr, ext, i, paa, pab, pba, pbb):
    n0, n1, n2 = _counts(geno, nbr, ext, i)
    r1, _, r2, _ = _channels(geno[i], n0, n1, n2, paa, pab, pba, pbb)
    return r1 + r2


@njit(cache=True)
def advance_genotype(geno, nbr, ext, paa, pab, pba, pbb,
                     t, t_end, seed, pos, max_events, ev_out):
    """Run the exact chain from t to t_end (or for max_events events).

    Mutates ``geno`` in place.  ``ev_out`` (float64[4]) receives the last
    event as (t, site, old, new) when max_events > 0.  Returns
    (t, pos, status, n_events).
    """
    n = geno.shape[0]
    site_rate = np.empty(n)
    for i in range(n):
        site_rate[i] = _site_total(geno, nbr, ext, i, paa, pab, pba, pbb)
    tree = np.empty(n + 1)
    _fw_build(site_rate, tree)
    total = 0.0
    for i in range(n):
        total += site_rate[i]

    n_events = 0
    while True:
        if total <= 1e-12:
            return t, pos, FROZEN, n_events
        u, pos = _u01(seed, pos)
        dt = -np.log(1.0 - u) / total
        if t + dt > t_end:
            return t_end, pos, RAN_TO_END, n_events
        v, pos = _u01(seed, pos)
        site = _fw_find(tree, n, v * total)
        # float drift can land on a zero-rate site; scan to a live one
        if site_rate[site] <= 0.0:
            site = 0
            while site < n - 1 and site_rate[site] <= 0.0:
                site += 1
        n0, n1, n2 = _counts(geno, nbr, ext, site)
        r1, tg1, r2, tg2 = _channels(geno[site], n0, n1, n2, paa, pab, pba, pbb)
        w, pos = _u01(seed, pos)
        new_g = tg1 if w * (r1 + r2) < r1 else tg2
        old_g = geno[site]
        geno[site] = new_g
        t = t + dt
        n_events += 1

        # refresh the site and its neighbors in the tree
        new_r = _site_total(geno, nbr, ext, site, paa, pab, pba, pbb)
        d = new_r - site_rate[site]
        if d != 0.0:
            _fw_add(tree, n, site, d)
            total += d
            site_rate[site] = new_r
        for k in range(nbr.shape[1]):
            j = nbr[site, k]
            if j >= 0:
                new_r = _site_total(geno, nbr, ext, j, paa, pab, pba, pbb)
                d = new_r - site_rate[j]
                if d != 0.0:
                    _fw_add(tree, n, j, d)
                    total += d
                    site_rate[j] = new_r

        if max_events > 0:
            ev_out[0] = t
            ev_out[1] = site
            ev_out[2] = old_g
            ev_out[3] = new_g
            if n_events >= max_events:
                return t, pos, RAN_TO_END, n_events

        if n_events % _REBUILD_EVERY == 0:
            for i in range(n):
                site_rate[i] = _site_total(geno, nbr, ext, i,
                                           paa, pab, pba, pbb)
            _fw_build(site_rate, tree)
            total = 0.0
            for i in range(n):
                total += site_rate[i]


# ---------------------------------------------------------------------------
# Direct two-state flip process (independent route for cross-checks)
# ---------------------------------------------------------------------------

@njit(cache=True)
def advance_flip(bits, nbr, phi, t, t_end, seed, pos):
    """Each site flips 0<->1 at rate phi times its number of 1-neighbors.

    Exterior (-1) neighbors count as 0.  Returns (t, pos, status, n_events).
    """
    n = bits.shape[0]
    site_rate = np.empty(n)
    for i in range(n):
        c = 0
        for k in range(nbr.shape[1]):
            j = nbr[i, k]
            if j >= 0 and bits[j] == 1:
                c += 1
        site_rate[i] = phi * c
    tree = np.empty(n + 1)
    _fw_build(site_rate, tree)
    total = 0.0
    for i in range(n):
        total += site_rate[i]

    n_events = 0
    while True:
        if total <= 1e-12:
            return t, pos, FROZEN, n_events
        u, pos = _u01(seed, pos)
        dt = -np.log(1.0 - u) / total
        if t + dt > t_end:
            return t_end, pos, RAN_TO_END, n_events
        v, pos = _u01(seed, pos)
        site = _fw_find(tree, n, v * total)
        if site_rate[site] <= 0.0:
            site = 0
            while site < n - 1 and site_rate[site] <= 0.0:
                site += 1
        delta = 1 if bits[site] == 0 else -1
        bits[site] = 1 - bits[site]
        t = t + dt
        n_events += 1
        # only the neighbors' rates change (own rate depends on neighbors only)
        for k in range(nbr.shape[1]):
            j = nbr[site, k]
            if j >= 0:
                d = phi * delta
                _fw_add(tree, n, j, d)
                total += d
                site_rate[j] += d
        if n_events % _REBUILD_EVERY == 0:
            for i in range(n):
                c = 0
                for k in range(nbr.shape[1]):
                    j = nbr[i, k]
                    if j >= 0 and bits[j] == 1:
                        c += 1
                site_rate[i] = phi * c
            _fw_build(site_rate, tree)
            total = 0.0
            for i in range(n):
                total += site_rate[i]


# ---------------------------------------------------------------------------
# Arrow application (gene-based process and the voter coupling)
# ---------------------------------------------------------------------------

# arrow labels
LBL_A = 0
LBL_B = 1
LBL_AA = 2
LBL_AB = 3
LBL_BA = 4
LBL_BB = 5
LBL_VOTER = 6  # unlabeled voter arrow of the dual construction (unused here)

# allele codes: 0 = a, 1 = b


@njit(cache=True, inline="always")
def _xi_apply(alleles, src, sslot, dst, dslot, label):
    g = alleles[src, sslot]
    h = alleles[src, 1 - sslot]
    if label == LBL_A:
        if g == 0:
            alleles[dst, dslot] = 0
    elif label == LBL_B:
        if g == 1:
            alleles[dst, dslot] = 1
    elif label == LBL_AA:
        if g == 0 and h == 0:
            alleles[dst, dslot] = 0
    elif label == LBL_AB:
        if g == 0 and h == 1:
            alleles[dst, dslot] = 0
    elif label == LBL_BA:
        if g == 1 and h == 0:
            alleles[dst, dslot] = 1
    elif label == LBL_BB:
        if g == 1 and h == 1:
            alleles[dst, dslot] = 1


@njit(cache=True, inline="always")
def _zeta_apply(alleles, src, sslot, dst, dslot, label):
    # voter reading of the coupled arrows: a-arrows copy a, b/ba/bb copy b
    g = alleles[src, sslot]
    if label == LBL_A:
        if g == 0:
            alleles[dst, dslot] = 0
    elif label == LBL_B or label == LBL_BA or label == LBL_BB:
        if g == 1:
            alleles[dst, dslot] = 1


@njit(cache=True)
def apply_gene_arrows(alleles, src, sslot, dst, dslot, label,
                      sample_idx, samples_out):
    """Apply arrows in order to the gene-based process.

    sample_idx[k] = number of arrows applied before sample k is taken;
    samples_out has shape (n_samples, n_sites, 2).
    """
    k = 0
    n_samp = sample_idx.shape[0]
    for e in range(src.shape[0]):
        while k < n_samp and sample_idx[k] == e:
            samples_out[k] = alleles
            k += 1
        _xi_apply(alleles, src[e], sslot[e], dst[e], dslot[e], label[e])
    while k < n_samp:
        samples_out[k] = alleles
        k += 1


@njit(cache=True)
def apply_coupled_arrows(xi, zeta, src, sslot, dst, dslot, label,
                         sample_idx, xi_out, zeta_out):
    """Drive xi and zeta from one arrow realization, checking domination.

    Returns the index of the first arrow after which some gene has
    zeta = a but xi = b, or -1 if domination holds throughout.
    """
    k = 0
    n_samp = sample_idx.shape[0]
    for e in range(src.shape[0]):
        while k < n_samp and sample_idx[k] == e:
            xi_out[k] = xi
            zeta_out[k] = zeta
            k += 1
        _xi_apply(xi, src[e], sslot[e], dst[e], dslot[e], label[e])
        _zeta_apply(zeta, src[e], sslot[e], dst[e], dslot[e], label[e])
        if zeta[dst[e], dslot[e]] == 0 and xi[dst[e], dslot[e]] == 1:
            return e
    while k < n_samp:
        xi_out[k] = xi
        zeta_out[k] = zeta
        k += 1
    return -1


# ---------------------------------------------------------------------------
# Mean-field RK4 integrator
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _mf_rhs(u0, u1, u2, paa, pab, pba, pbb):
    ba = 2.0 * paa * u0 + pab * u1
    bb = 2.0 * pbb * u2 + pba * u1
    d0 = ba * u1 * 0.5 - bb * u0
    d1 = ba * (u2 - u1 * 0.5) + bb * (u0 - u1 * 0.5)
    d2 = bb * u1 * 0.5 - ba * u2
    return d0, d1, d2


@njit(cache=True)
def rk4_meanfield(u0, paa, pab, pba, pbb, h, n_steps, sample_every, out):
    """Fixed-step RK4 with per-step simplex renormalization.

    out has shape (n_steps // sample_every + 1, 3) and receives the state at
    steps 0, sample_every, 2*sample_every, ...  Returns (bad_step, max_defect)
    where bad_step = -1 on success or the 1-based step producing a NaN.
    """
    a, b, c = u0[0], u0[1], u0[2]
    out[0, 0] = a
    out[0, 1] = b
    out[0, 2] = c
    si = 1
    max_defect = 0.0
    for step in range(1, n_steps + 1):
        k10, k11, k12 = _mf_rhs(a, b, c, paa, pab, pba, pbb)
        k20, k21, k22 = _mf_rhs(a + 0.5 * h * k10, b + 0.5 * h * k11,
                                c + 0.5 * h * k12, paa, pab, pba, pbb)
        k30, k31, k32 = _mf_rhs(a + 0.5 * h * k20, b + 0.5 * h * k21,
                                c + 0.5 * h * k22, paa, pab, pba, pbb)
        k40, k41, k42 = _mf_rhs(a + h * k30, b + h * k31, c + h * k32,
                                paa, pab, pba, pbb)
        a += h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
        b += h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        c += h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        s = a + b + c
        if not np.isfinite(s):
            return step, max_defect
        defect = abs(s - 1.0)
        if defect > max_defect:
            max_defect = defect
        a /= s
        b /= s
        c /= s
        if step % sample_every == 0:
            out[si, 0] = a
            out[si, 1] = b
            out[si, 2] = c
            si += 1
    return -1, max_defect


# ---------------------------------------------------------------------------
# Invasion-path random walk
# ---------------------------------------------------------------------------

@njit(cache=True)
def walk_hits(r, k_target, n_walks, seed, pos):
    """Count walks from 0 hitting k_target before -1.

    Steps: floor(y)+1 with probability r, else y - 1/2.
    """
    hits = 0
    for _ in range(n_walks):
        y = 0.0
        while True:
            u, pos = _u01(seed, pos)
            if u < r:
                y = np.floor(y) + 1.0
            else:
                y -= 0.5
            if y >= k_target:
                hits += 1
                break
            if y <= -1.0:
                break
    return hits, pos


@njit(cache=True)
def martingale_increments(r, c, n_reps, seed, pos):
    """Increments of c**Y over the integer skeleton of the walk, from 0.

    Each repetition runs the half-step walk from 0 until it reaches the
    integer +1 or -1 and records c**hit - 1.  Returns (sum, sumsq, pos).
    """
    s = 0.0
    s2 = 0.0
    for _ in range(n_reps):
        y = 0.0
        while True:
            u, pos = _u01(seed, pos)
            if u < r:
                y = np.floor(y) + 1.0
            else:
                y -= 0.5
            if y >= 1.0 or y <= -1.0:
                break
        inc = c ** y - 1.0
        s += inc
        s2 += inc * inc
    return s, s2, pos
