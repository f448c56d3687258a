"""Compiled inner loops: statistic evaluation and Metropolis dyad updates.

Statistics are passed as parallel arrays (kind code, decay, covariate
column) so that one compiled routine serves every model.
"""

import math

import numba
import numpy as np

EDGES = 0
TWOSTAR = 1
THREESTAR = 2
TRIANGLE = 3
FOURCYCLE = 4
GWD = 5
GWESP = 6
COVMAIN = 7
COVHOMOPHILY = 8


@numba.njit(cache=True)
def _geo_weight(k, decay):
    if k <= 0:
        return 0.0
    return math.exp(decay) * (1.0 - (1.0 - math.exp(-decay)) ** k)


@numba.njit(cache=True)
def _shared(adj, a, b):
    n = adj.shape[0]
    c = 0
    for k in range(n):
        c += adj[a, k] & adj[b, k]
    return c


@numba.njit(cache=True)
def full_stats(adj, codes, decays, covx, covcol, out):
    n = adj.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            deg[i] += adj[i, j]
    sp = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            c = _shared(adj, i, j)
            sp[i, j] = c
            sp[j, i] = c
    for s in range(codes.shape[0]):
        code = codes[s]
        acc = 0.0
        if code == EDGES:
            for i in range(n):
                acc += deg[i]
            acc /= 2.0
        elif code == TWOSTAR:
            for i in range(n):
                acc += deg[i] * (deg[i] - 1) / 2.0
        elif code == THREESTAR:
            for i in range(n):
                acc += deg[i] * (deg[i] - 1) * (deg[i] - 2) / 6.0
        elif code == TRIANGLE:
            for i in range(n):
                for j in range(i + 1, n):
                    if adj[i, j]:
                        acc += sp[i, j]
            acc /= 3.0
        elif code == FOURCYCLE:
            # every 4-cycle has two diagonals, each a pair with >= 2 shared partners
            for i in range(n):
                for j in range(i + 1, n):
                    acc += sp[i, j] * (sp[i, j] - 1) / 2.0
            acc /= 2.0
        elif code == GWD:
            for i in range(n):
                acc += _geo_weight(deg[i], decays[s])
        elif code == GWESP:
            for i in range(n):
                for j in range(i + 1, n):
                    if adj[i, j]:
                        acc += _geo_weight(sp[i, j], decays[s])
        elif code == COVMAIN:
            c = covcol[s]
            for i in range(n):
                for j in range(i + 1, n):
                    if adj[i, j]:
                        acc += covx[i, c] + covx[j, c]
        elif code == COVHOMOPHILY:
            c = covcol[s]
            for i in range(n):
                for j in range(i + 1, n):
                    if adj[i, j] and covx[i, c] == covx[j, c]:
                        acc += 1.0
        out[s] = acc


@numba.njit(cache=True)
def change_add(adj, deg, i, j, codes, decays, covx, covcol, out):
    """s(y + {i,j}) - s(y) for a dyad that is currently empty."""
    n = adj.shape[0]
    di = deg[i]
    dj = deg[j]
    sp_ij = -1
    for s in range(codes.shape[0]):
        code = codes[s]
        d = 0.0
        if code == EDGES:
            d = 1.0
        elif code == TWOSTAR:
            d = di + dj
        elif code == THREESTAR:
            d = di * (di - 1) / 2.0 + dj * (dj - 1) / 2.0
        elif code == TRIANGLE:
            if sp_ij < 0:
                sp_ij = _shared(adj, i, j)
            d = sp_ij
        elif code == FOURCYCLE:
            # paths i - b - a - j of length three
            c = 0
            for b in range(n):
                if adj[i, b]:
                    for a in range(n):
                        c += adj[b, a] & adj[a, j]
            d = c
        elif code == GWD:
            dec = decays[s]
            d = (_geo_weight(di + 1, dec) - _geo_weight(di, dec)
                 + _geo_weight(dj + 1, dec) - _geo_weight(dj, dec))
        elif code == GWESP:
            dec = decays[s]
            if sp_ij < 0:
                sp_ij = _shared(adj, i, j)
            d = _geo_weight(sp_ij, dec)
            for k in range(n):
                if adj[i, k] and adj[j, k]:
                    sik = _shared(adj, i, k)
                    sjk = _shared(adj, j, k)
                    d += _geo_weight(sik + 1, dec) - _geo_weight(sik, dec)
                    d += _geo_weight(sjk + 1, dec) - _geo_weight(sjk, dec)
        elif code == COVMAIN:
            c = covcol[s]
            d = covx[i, c] + covx[j, c]
        elif code == COVHOMOPHILY:
            c = covcol[s]
            d = 1.0 if covx[i, c] == covx[j, c] else 0.0
        out[s] = d


@numba.njit(cache=True)
def _set_dyad(adj, deg, i, j, value):
    if adj[i, j] != value:
        adj[i, j] = value
        adj[j, i] = value
        if value:
            deg[i] += 1
            deg[j] += 1
        else:
            deg[i] -= 1
            deg[j] -= 1


@numba.njit(cache=True)
def toggle_step(adj, deg, stats, theta, i, j, u, codes, decays, covx, covcol, delta):
    """One Metropolis toggle proposal at dyad (i, j); returns 1 if accepted."""
    present = adj[i, j]
    if present:
        _set_dyad(adj, deg, i, j, 0)
    change_add(adj, deg, i, j, codes, decays, covx, covcol, delta)
    logr = 0.0
    for s in range(theta.shape[0]):
        logr += theta[s] * delta[s]
    if present:
        logr = -logr
    if logr >= 0.0 or u < math.exp(logr):
        if present:
            for s in range(stats.shape[0]):
                stats[s] -= delta[s]
        else:
            _set_dyad(adj, deg, i, j, 1)
            for s in range(stats.shape[0]):
                stats[s] += delta[s]
        return 1
    if present:
        _set_dyad(adj, deg, i, j, 1)
    return 0


@numba.njit(cache=True)
def run_chain(adj, stats, theta, n_steps, seed, codes, decays, covx, covcol):
    """Advance the chain n_steps proposals in place; returns accepted count."""
    np.random.seed(seed)
    n = adj.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            deg[a] += adj[a, b]
    delta = np.zeros(codes.shape[0])
    accepted = 0
    for _ in range(n_steps):
        i = np.random.randint(0, n)
        j = np.random.randint(0, n - 1)
        if j >= i:
            j += 1
        u = np.random.random()
        accepted += toggle_step(adj, deg, stats, theta, i, j, u, codes, decays, covx, covcol, delta)
    return accepted


@numba.njit(cache=True)
def run_chain_record(adj, stats, theta, burn_in, thin, n_record, seed,
                     codes, decays, covx, covcol, record):
    """Burn in, then store the statistics every ``thin`` proposals into record."""
    np.random.seed(seed)
    n = adj.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    for a in range(n):
        for b in range(n):
            deg[a] += adj[a, b]
    delta = np.zeros(codes.shape[0])
    accepted = 0
    total = burn_in + thin * n_record
    r = 0
    for step in range(total):
        i = np.random.randint(0, n)
        j = np.random.randint(0, n - 1)
        if j >= i:
            j += 1
        u = np.random.random()
        accepted += toggle_step(adj, deg, stats, theta, i, j, u, codes, decays, covx, covcol, delta)
        done = step + 1 - burn_in
        if done > 0 and done % thin == 0:
            for s in range(stats.shape[0]):
                record[r, s] = stats[s]
            r += 1
    return accepted
