"""Compiled fast path for bulk oracle sessions.

This is a line-for-line port of ``ranks.LazyRanks`` + ``oracle.OracleSession``
over flat arrays, for both the adjacency-list model (CSR arrays of G) and the
virtual graph H of the matrix-model reduction (dense adjacency matrix of G).
It consumes the SplitMix64 stream in exactly the same order as the Python
classes, so for a given seed both engines return identical answers, call
counts and query tallies; the test-suite holds them to that.

State lives in numba structrefs rather than jitclasses so that every
function can be cached on disk: the first process compiles, later ones load
machine code.

Ranks are stored as ``rank ^ 2**63`` reinterpreted as int64, which preserves
the unsigned order under signed comparison.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, types
from numba.experimental import structref

_U0 = np.uint64(0)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SIGN = np.uint64(0x8000000000000000)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_LOG_TAIL_CUTOFF = 60.0

MODE_LIST = 0
MODE_MATRIX = 1


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def derive_seed(master, index):
    return mix64(mix64(master + _GOLDEN) + np.uint64(index))




jit = njit(cache=True)


@jit
def _grow1(a, size):
    b = np.zeros(size, dtype=a.dtype)
    b[: a.size] = a
    return b


@jit
def _grow_stack(a):
    return _grow1(a, 2 * a.size)


class _Unliteral(types.StructRef):
    def preprocess_fields(self, fields):
        return tuple((name, types.unliteral(typ)) for name, typ in fields)


# -- int64 -> int64 map; clear() is O(1) via epoch stamps ----------------------------------


@structref.register
class IntMapType(_Unliteral):
    pass


_IntMap = IntMapType([
    ("keys", types.int64[:]), ("vals", types.int64[:]), ("stamp", types.int64[:]),
    ("epoch", types.int64), ("size", types.int64), ("mask", types.int64),
])


@jit
def map_new(cap):
    c = 16
    while c < 2 * cap:
        c *= 2
    m = structref.new(_IntMap)
    m.keys = np.zeros(c, dtype=np.int64)
    m.vals = np.zeros(c, dtype=np.int64)
    m.stamp = np.zeros(c, dtype=np.int64)
    m.epoch = 1
    m.size = 0
    m.mask = c - 1
    return m


@jit
def map_clear(m):
    m.epoch += 1
    m.size = 0


@jit
def _map_slot(m, key):
    h = np.uint64(key) * _GOLDEN
    i = np.int64(h >> np.uint64(32)) & m.mask
    while m.stamp[i] == m.epoch and m.keys[i] != key:
        i = (i + 1) & m.mask
    return i


@jit
def map_contains(m, key):
    return m.stamp[_map_slot(m, key)] == m.epoch


@jit
def map_get(m, key, default):
    i = _map_slot(m, key)
    if m.stamp[i] == m.epoch:
        return m.vals[i]
    return default


@jit
def _map_grow(m):
    keys = m.keys
    vals = m.vals
    stamp = m.stamp
    ep = m.epoch
    c = 2 * (m.mask + 1)
    m.keys = np.zeros(c, dtype=np.int64)
    m.vals = np.zeros(c, dtype=np.int64)
    m.stamp = np.zeros(c, dtype=np.int64)
    m.mask = c - 1
    for t in range(keys.size):
        if stamp[t] == ep:
            i = _map_slot(m, keys[t])
            m.keys[i] = keys[t]
            m.vals[i] = vals[t]
            m.stamp[i] = ep


@jit
def map_set(m, key, val):
    i = _map_slot(m, key)
    if m.stamp[i] != m.epoch:
        m.size += 1
        m.keys[i] = key
        m.stamp[i] = m.epoch
    m.vals[i] = val
    if 2 * m.size > m.mask:
        _map_grow(m)


# -- lazy rank state ---------------------------------------------------------------------


@structref.register
class LazyStateType(_Unliteral):
    pass


_State = LazyStateType([
    ("mode", types.int64),
    ("indptr", types.int64[:]),
    ("nbr", types.int64[:]),
    ("eid", types.int64[:]),
    ("adjmat", types.uint8[:, :]),
    ("base_n", types.int64),
    ("s", types.int64),
    ("nh", types.int64),
    ("levels", types.int64),
    ("top", types.int64),
    ("starts", types.uint64[:]),
    ("wbits", types.int64[:]),
    ("rng", types.uint64),
    ("deg_q", types.int64),
    ("nbr_q", types.int64),
    ("pair_q", types.int64),
    ("vslot", _IntMap),
    ("edge_rank", _IntMap),
    ("nslots", types.int64),
    ("s_level", types.int64[:]),
    ("s_deg", types.int64[:]),
    ("s_known", types.int64[:]),
    ("s_len", types.int64[:]),
    ("s_cap", types.int64[:]),
    ("s_off", types.int64[:]),
    ("s_counts", types.int64[:, :]),
    ("pool_key", types.int64[:]),
    ("pool_eid", types.int64[:]),
    ("pool_nbr", types.int64[:]),
    ("pool_used", types.int64),
    ("perm", types.int64[:]),
    ("idx_buf", types.int64[:]),
    ("hit_buf", types.int64[:]),
])


@jit
def state_reset(st, seed):
    st.rng = seed
    st.deg_q = 0
    st.nbr_q = 0
    st.pair_q = 0
    map_clear(st.vslot)
    map_clear(st.edge_rank)
    st.nslots = 0
    st.pool_used = 0


@jit
def state_new(mode, indptr, nbr, eid, adjmat, base_n, s, nh, top):
    st = structref.new(_State)
    st.mode = mode
    st.indptr = indptr
    st.nbr = nbr
    st.eid = eid
    st.adjmat = adjmat
    st.base_n = base_n
    st.s = s
    st.nh = nh
    st.top = top
    levels = 0
    while (1 << levels) < top:
        levels += 1
    st.levels = levels
    st.starts = np.zeros(levels + 1, dtype=np.uint64)
    st.wbits = np.zeros(levels + 1, dtype=np.int64)
    for k in range(levels + 1):
        if k > 0:
            st.starts[k] = np.uint64(1) << np.uint64(64 + k - 1 - levels)
        st.wbits[k] = 64 - levels + max(k - 1, 0)
    st.vslot = map_new(64)
    st.edge_rank = map_new(256)
    cap = 64
    st.s_level = np.zeros(cap, dtype=np.int64)
    st.s_deg = np.zeros(cap, dtype=np.int64)
    st.s_known = np.zeros(cap, dtype=np.int64)
    st.s_len = np.zeros(cap, dtype=np.int64)
    st.s_cap = np.zeros(cap, dtype=np.int64)
    st.s_off = np.zeros(cap, dtype=np.int64)
    st.s_counts = np.zeros((cap, levels + 1), dtype=np.int64)
    st.pool_key = np.zeros(1024, dtype=np.int64)
    st.pool_eid = np.zeros(1024, dtype=np.int64)
    st.pool_nbr = np.zeros(1024, dtype=np.int64)
    st.perm = np.arange(64)
    st.idx_buf = np.zeros(64, dtype=np.int64)
    st.hit_buf = np.zeros(64, dtype=np.int64)
    state_reset(st, _U0)
    return st


# SplitMix64 -----------------------------------------------------------------------------


@jit
def next_u64(st):
    st.rng = st.rng + _GOLDEN
    return mix64(st.rng)


@jit
def next_double(st):
    return np.float64(next_u64(st) >> _S11) * _INV53


@jit
def bounded(st, n):
    nn = np.uint64(n)
    threshold = (_U0 - nn) % nn
    while True:
        x = next_u64(st)
        if x >= threshold:
            return np.int64(x % nn)


@jit
def binomial(st, n, p):
    """Same walk as ``ranks.binomial_sample``; p > 1/2 is handled by flipping the result."""
    if n == 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    flip = p > 0.5
    if flip:
        p = 1.0 - p
    log_p = math.log(p)
    log_q = math.log(1.0 - p)
    log_ratio = log_p - log_q
    mode = int((n + 1) * p)
    if mode > n:
        mode = n
    log_mode = (math.lgamma(n + 1.0) - math.lgamma(mode + 1.0) - math.lgamma(n - mode + 1.0)
                + mode * log_p + (n - mode) * log_q)
    floor = log_mode - _LOG_TAIL_CUTOFF
    while True:
        u = next_double(st) - math.exp(log_mode)
        if u < 0.0:
            return n - mode if flip else mode
        lo = mode
        lo_lp = log_mode
        hi = mode
        hi_lp = log_mode
        while (lo > 0 and lo_lp > floor) or (hi < n and hi_lp > floor):
            if lo > 0 and lo_lp > floor:
                lo_lp += math.log(lo) - math.log(n - lo + 1) - log_ratio
                lo -= 1
                u -= math.exp(lo_lp)
                if u < 0.0:
                    return n - lo if flip else lo
            if hi < n and hi_lp > floor:
                hi_lp += math.log(n - hi) - math.log(hi + 1) + log_ratio
                hi += 1
                u -= math.exp(hi_lp)
                if u < 0.0:
                    return n - hi if flip else hi


@jit
def sample_indices(st, d, size):
    """Partial Fisher-Yates into ``idx_buf[:size]`` (1-based), using an identity scratch array.

    Same draws and same output as the sparse-map version in ``ranks``;
    touched scratch slots are restored before returning.
    """
    if d > st.perm.size:
        st.perm = np.arange(max(d, 2 * st.perm.size))
    if size > st.idx_buf.size:
        st.idx_buf = np.zeros(max(size, 2 * st.idx_buf.size), dtype=np.int64)
        st.hit_buf = np.zeros(st.idx_buf.size, dtype=np.int64)
    perm = st.perm
    out = st.idx_buf
    hit = st.hit_buf
    for j in range(size):
        r = j + bounded(st, d - j)
        out[j] = perm[r] + 1
        perm[r] = perm[j]
        hit[j] = r
    for j in range(size):
        perm[hit[j]] = hit[j]
        perm[j] = j


# query model ----------------------------------------------------------------------------


@jit
def query_degree(st, x):
    st.deg_q += 1
    if st.mode == MODE_LIST:
        return st.indptr[x + 1] - st.indptr[x]
    n = st.base_n
    if x < n:
        return n
    if x < 2 * n:
        return n + st.s
    return 1


@jit
def query_neighbor(st, x, i):
    st.nbr_q += 1
    if st.mode == MODE_LIST:
        pos = st.indptr[x] + i - 1
        return st.nbr[pos], st.eid[pos]
    n = st.base_n
    if x >= 2 * n:
        y = n + (x - 2 * n) // st.s
    elif x >= n and i > n:
        y = 2 * n + (x - n) * st.s + (i - n - 1)
    else:
        v = x % n
        j = i - 1
        st.pair_q += 1
        same_side = st.adjmat[v, j] != 0
        if x < n:
            y = j if same_side else n + j
        else:
            y = n + j if same_side else j
    if x < y:
        return y, x * st.nh + y
    return y, y * st.nh + x


# lazy exposure --------------------------------------------------------------------------


@jit
def _grow_slots(st):
    cap = st.s_level.size * 2
    st.s_level = _grow1(st.s_level, cap)
    st.s_deg = _grow1(st.s_deg, cap)
    st.s_known = _grow1(st.s_known, cap)
    st.s_len = _grow1(st.s_len, cap)
    st.s_cap = _grow1(st.s_cap, cap)
    st.s_off = _grow1(st.s_off, cap)
    counts = np.zeros((cap, st.levels + 1), dtype=np.int64)
    counts[: st.s_counts.shape[0], :] = st.s_counts
    st.s_counts = counts


@jit
def slot_of(st, v):
    sl = map_get(st.vslot, v, -1)
    if sl >= 0:
        return sl
    sl = st.nslots
    if sl == st.s_level.size:
        _grow_slots(st)
    st.nslots = sl + 1
    map_set(st.vslot, v, sl)
    st.s_level[sl] = 0
    st.s_deg[sl] = -1
    st.s_known[sl] = 0
    st.s_len[sl] = 0
    st.s_cap[sl] = 0
    st.s_off[sl] = 0
    st.s_counts[sl, :] = 0
    return sl


@jit
def degree(st, v):
    sl = slot_of(st, v)
    if st.s_deg[sl] < 0:
        st.s_deg[sl] = query_degree(st, v)
    return st.s_deg[sl]


@jit
def _insert(st, sl, key, e, w):
    length = st.s_len[sl]
    if length == st.s_cap[sl]:
        cap = max(4, 2 * length)
        need = st.pool_used + cap
        if need > st.pool_key.size:
            size = max(need, 2 * st.pool_key.size)
            st.pool_key = _grow1(st.pool_key, size)
            st.pool_eid = _grow1(st.pool_eid, size)
            st.pool_nbr = _grow1(st.pool_nbr, size)
        old = st.s_off[sl]
        new = st.pool_used
        for t in range(length):
            st.pool_key[new + t] = st.pool_key[old + t]
            st.pool_eid[new + t] = st.pool_eid[old + t]
            st.pool_nbr[new + t] = st.pool_nbr[old + t]
        st.s_off[sl] = new
        st.s_cap[sl] = cap
        st.pool_used = need
    off = st.s_off[sl]
    pk = st.pool_key
    pe = st.pool_eid
    pn = st.pool_nbr
    lo = 0
    hi = length
    while lo < hi:
        mid = (lo + hi) // 2
        mk = pk[off + mid]
        if mk < key or (mk == key and pe[off + mid] < e):
            lo = mid + 1
        else:
            hi = mid
    t = off + length
    while t > off + lo:
        pk[t] = pk[t - 1]
        pe[t] = pe[t - 1]
        pn[t] = pn[t - 1]
        t -= 1
    pk[off + lo] = key
    pe[off + lo] = e
    pn[off + lo] = w
    st.s_len[sl] = length + 1


@jit
def expose_next(st, v):
    sl = slot_of(st, v)
    k = st.s_level[sl]
    if k > st.levels:
        raise RuntimeError("no interval left to open")
    d = degree(st, v)
    if k == 0:
        p = 1.0 / float(st.top)
    else:
        half = 1 << (k - 1)
        p = float(half) / float(st.top - half)
    size = binomial(st, d, p)
    sample_indices(st, d, size)
    idx = st.idx_buf
    for t in range(size):
        u, e = query_neighbor(st, v, idx[t])
        if map_contains(st.edge_rank, e):
            continue
        su = slot_of(st, u)
        if st.s_level[su] > k:
            continue
        r = st.starts[k] + (next_u64(st) >> np.uint64(64 - st.wbits[k]))
        key = np.int64(r ^ _SIGN)
        map_set(st.edge_rank, e, key)
        st.s_counts[sl, k] += 1
        st.s_counts[su, k] += 1
        _insert(st, sl, key, e, u)
        _insert(st, su, key, e, v)
    # slot ids are stable even when the slot arrays are reallocated
    st.s_known[sl] += st.s_counts[sl, k]
    st.s_level[sl] = k + 1


@jit
def lowest(st, v, i):
    d = degree(st, v)
    if i > d:
        return -1, -1
    sl = map_get(st.vslot, v, -1)
    while st.s_known[sl] < i:
        expose_next(st, v)
    pos = st.s_off[sl] + i - 1
    return st.pool_nbr[pos], st.pool_eid[pos]


@jit
def rank_key(st, e):
    return map_get(st.edge_rank, e, 0)


@jit
def run_vertex(st, v, cache, qd, cap, stacks):
    """One vertex-oracle session; returns (matched, partner, T, max_path, max_q).

    ``stacks`` is a (5, depth) scratch array for the explicit recursion
    stack; it is copied into larger local arrays if a path outgrows it.
    """
    map_clear(cache)
    map_clear(qd)
    se = stacks[0]
    su = stacks[1]
    sc = stacks[2]
    sj = stacks[3]
    sk = stacks[4]
    depth = 0
    t_count = 0
    max_path = 0
    max_q = 0
    partner = -1
    matched = False
    j0 = 1
    while True:
        w, e = lowest(st, v, j0)
        if w < 0:
            break
        t_count += 1
        q = map_get(qd, e, 0) + 1
        map_set(qd, e, q)
        if q > max_q:
            max_q = q
        c = map_get(cache, 2 * e + (1 if w > v else 0), -1)
        if c >= 0:
            answer = c == 1
        else:
            se[0] = e
            su[0] = w
            sc[0] = v
            sj[0] = 1
            sk[0] = rank_key(st, e)
            depth = 1
            if max_path < 1:
                max_path = 1
            while True:
                top = depth - 1
                x, f = lowest(st, su[top], sj[top])
                if f == se[top]:
                    answer = True
                else:
                    t_count += 1
                    q = map_get(qd, f, 0) + 1
                    map_set(qd, f, q)
                    if q > max_q:
                        max_q = q
                    c = map_get(cache, 2 * f + (1 if x > su[top] else 0), -1)
                    if c < 0:
                        rk = rank_key(st, f)
                        if not (rk < sk[top] or (rk == sk[top] and f < se[top])):
                            raise AssertionError("rank does not decrease along the query path")
                        if depth == se.size:
                            se = _grow_stack(se)
                            su = _grow_stack(su)
                            sc = _grow_stack(sc)
                            sj = _grow_stack(sj)
                            sk = _grow_stack(sk)
                        se[depth] = f
                        su[depth] = x
                        sc[depth] = su[top]
                        sj[depth] = 1
                        sk[depth] = rk
                        depth += 1
                        if depth > max_path:
                            max_path = depth
                        continue
                    if c == 0:
                        sj[top] += 1
                        continue
                    answer = False
                while True:
                    depth -= 1
                    map_set(cache, 2 * se[depth] + (1 if su[depth] > sc[depth] else 0), 1 if answer else 0)
                    if depth == 0:
                        break
                    if answer:
                        answer = False
                        continue
                    sj[depth - 1] += 1
                    break
                if depth == 0:
                    break
        if answer:
            matched = True
            partner = w
            break
        j0 += 1
    if max_q > 2 * cap - 1:
        raise AssertionError("edge queried more than 2n-1 times in one session")
    return matched, partner, t_count, max_path, max_q


@jit
def _list_state(indptr, nbr, eid, top):
    n = indptr.size - 1
    return state_new(MODE_LIST, indptr, nbr, eid, np.zeros((1, 1), dtype=np.uint8), n, 0, n, top)


@njit(cache=True, nogil=True)
def _list_samples(indptr, nbr, eid, pool, top, seed, start, count):
    n = indptr.size - 1
    st = _list_state(indptr, nbr, eid, top)
    cache = map_new(64)
    qd = map_new(64)
    stacks = np.zeros((5, 64), dtype=np.int64)
    out = np.zeros((count, 8), dtype=np.int64)
    for t in range(count):
        state_reset(st, derive_seed(seed, start + t))
        v = pool[bounded(st, pool.size)]
        matched, partner, tc, mp, mq = run_vertex(st, v, cache, qd, n, stacks)
        out[t, 0] = v
        out[t, 1] = 1 if matched else 0
        out[t, 2] = partner
        out[t, 3] = tc
        out[t, 4] = mp
        out[t, 5] = st.deg_q
        out[t, 6] = st.nbr_q
        out[t, 7] = mq
    return out


@njit(cache=True, nogil=True)
def _matrix_samples(adjmat, s, seed, start, count):
    n = adjmat.shape[0]
    nh = 2 * n + n * s
    top = 1
    while top < n + s:
        top *= 2
    dummy = np.zeros(1, dtype=np.int64)
    st = state_new(MODE_MATRIX, dummy, dummy, dummy, adjmat, n, s, nh, top)
    cache = map_new(64)
    qd = map_new(64)
    stacks = np.zeros((5, 64), dtype=np.int64)
    out = np.zeros((count, 9), dtype=np.int64)
    for t in range(count):
        state_reset(st, derive_seed(seed, start + t))
        v = bounded(st, n)
        matched, partner, tc, mp, mq = run_vertex(st, v, cache, qd, nh, stacks)
        out[t, 0] = v
        out[t, 1] = 1 if (matched and partner < n) else 0
        out[t, 2] = partner
        out[t, 3] = tc
        out[t, 4] = mp
        out[t, 5] = st.deg_q
        out[t, 6] = st.nbr_q
        out[t, 7] = mq
        out[t, 8] = st.pair_q
    return out


@njit(cache=True, nogil=True)
def _matched_flags(indptr, nbr, eid, top, seed):
    n = indptr.size - 1
    st = _list_state(indptr, nbr, eid, top)
    state_reset(st, seed)
    cache = map_new(64)
    qd = map_new(64)
    stacks = np.zeros((5, 64), dtype=np.int64)
    flags = np.zeros(n, dtype=np.uint8)
    for v in range(n):
        matched, partner, tc, mp, mq = run_vertex(st, v, cache, qd, n, stacks)
        flags[v] = 1 if matched else 0
    return flags


@njit(cache=True, nogil=True)
def _gmm_sizes(indptr, nbr, eid, top, master, count):
    n = indptr.size - 1
    st = _list_state(indptr, nbr, eid, top)
    cache = map_new(64)
    qd = map_new(64)
    stacks = np.zeros((5, 64), dtype=np.int64)
    sizes = np.zeros(count, dtype=np.int64)
    for t in range(count):
        state_reset(st, derive_seed(master, t))
        matched_vertices = 0
        for v in range(n):
            matched, partner, tc, mp, mq = run_vertex(st, v, cache, qd, n, stacks)
            if matched:
                matched_vertices += 1
        sizes[t] = matched_vertices // 2
    return sizes


@jit
def _binomial_draws(n, p, seed, count):
    st = _list_state(np.zeros(2, dtype=np.int64), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), 1)
    state_reset(st, seed)
    out = np.empty(count, dtype=np.int64)
    for t in range(count):
        out[t] = binomial(st, n, p)
    return out


# -- Python-facing wrappers ------------------------------------------------------------


def _u64(x: int) -> np.uint64:
    return np.uint64(x & 0xFFFFFFFFFFFFFFFF)


def list_samples(csr, pool: np.ndarray, top: int, seed: int, start: int, count: int) -> np.ndarray:
    """Per-sample rows ``(vertex, matched, partner, T, max_path, degree_q, neighbor_q, max_q)``."""
    indptr, nbr, eid = csr
    return _list_samples(indptr, nbr, eid, np.asarray(pool, dtype=np.int64), top, _u64(seed), start, count)


def matrix_samples(adjmat: np.ndarray, s: int, seed: int, start: int, count: int) -> np.ndarray:
    """Rows ``(vertex, within_v1, partner, T, max_path, degree_q, neighbor_q, max_q, pair_q)``."""
    return _matrix_samples(np.ascontiguousarray(adjmat, dtype=np.uint8), s, _u64(seed), start, count)


def matched_flags(csr, top: int, seed: int) -> np.ndarray:
    indptr, nbr, eid = csr
    return _matched_flags(indptr, nbr, eid, top, _u64(seed))


def gmm_sizes(csr, top: int, master: int, count: int) -> np.ndarray:
    """|GMM| for ``count`` independent lazy-rank runs seeded ``derive_seed(master, t)``."""
    indptr, nbr, eid = csr
    return _gmm_sizes(indptr, nbr, eid, top, _u64(master), count)


def binomial_draws(n: int, p: float, seed: int, count: int) -> np.ndarray:
    return _binomial_draws(n, p, _u64(seed), count)
