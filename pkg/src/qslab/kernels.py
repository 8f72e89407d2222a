"""Hot inner loops, each in a numba and a pure-numpy flavour.

The module-level names without suffix (``xorshift_fill``, ``apply_1q`` ...)
dispatch to the numba versions unless numba is missing or the
``QSL_DISABLE_NUMBA`` environment flag is set. The ``*_numba`` and
``*_numpy`` variants stay importable so tests and the benchmark can compare
them directly.

Index convention everywhere: bit ``q`` of a basis index is qubit ``q``
(little-endian), so qubit ``q`` has stride ``2**q`` in a state vector.
"""

import numpy as np

from ._accel import USE_NUMBA, njit, prange

# xorshift64* (Vigna 2014): shifts (12, 25, 27), output multiplier below.
XS_MULT = np.uint64(0x2545F4914F6CDD1D)
_S12 = np.uint64(12)
_S25 = np.uint64(25)
_S27 = np.uint64(27)
_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------- PRNG ----

@njit
def xorshift_fill_numba(state, out):
    x = np.uint64(state)
    for i in range(out.shape[0]):
        x ^= x >> _S12
        x ^= x << _S25
        x ^= x >> _S27
        out[i] = x * XS_MULT
    return x


def _xs_step_py(x: int) -> int:
    x ^= x >> 12
    x ^= (x << 25) & _MASK64
    x ^= x >> 27
    return x


def _gf2_apply(cols: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply a 64x64 GF(2) matrix (given by its 64 column images) to words."""
    out = np.zeros_like(v)
    one = np.uint64(1)
    zero = np.uint64(0)
    for c in range(64):
        bit = (v >> np.uint64(c)) & one
        out ^= cols[c] & (zero - bit)
    return out


_JUMP_LANES = 4096
_jump_cache: dict[int, np.ndarray] = {}


def _jump_matrix(steps_log2: int) -> np.ndarray:
    """Columns of T^(2**steps_log2) where T is one xorshift64 state step."""
    if steps_log2 not in _jump_cache:
        cols = np.array([_xs_step_py(1 << c) for c in range(64)], dtype=np.uint64)
        for _ in range(steps_log2):
            cols = _gf2_apply(cols, cols)
        _jump_cache[steps_log2] = cols
    return _jump_cache[steps_log2]


def xorshift_fill_numpy(state, out):
    """Same stream as the numba loop, vectorised over 4096 lanes.

    The state update is linear over GF(2), so lane ``j`` of round ``r`` can be
    advanced by a precomputed jump matrix T^4096 instead of stepping serially.
    """
    total = out.shape[0]
    if total == 0:
        return np.uint64(state)
    lanes_n = min(total, _JUMP_LANES)
    lanes = np.empty(lanes_n, dtype=np.uint64)
    x = int(state)
    for j in range(lanes_n):
        x = _xs_step_py(x)
        lanes[j] = x
    jump = _jump_matrix(12)
    pos = 0
    while True:
        take = min(lanes_n, total - pos)
        out[pos:pos + take] = lanes[:take] * XS_MULT
        if pos + take == total:
            return lanes[take - 1]
        lanes = _gf2_apply(jump, lanes)
        pos += lanes_n


# ---------------------------------------------------------- gate kernels --

@njit(parallel=True)
def apply_1q_numba(psi, q, m):
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    bit = 1 << q
    low = bit - 1
    for i in prange(psi.shape[0] >> 1):
        i0 = ((i & ~low) << 1) | (i & low)
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = m00 * a + m01 * b
        psi[i1] = m10 * a + m11 * b


def apply_1q_numpy(psi, q, m):
    v = psi.reshape(-1, 2, 1 << q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    v[:, 1, :] = m[1, 0] * a + m[1, 1] * b


@njit(parallel=True)
def apply_2q_numba(psi, q1, q2, m):
    # Triple loop over the bits above q2, between q1 and q2, and below q1;
    # the outer loop is split across workers, each l is touched exactly once.
    s1 = 1 << q1
    s2 = 1 << q2
    for ii in prange(psi.shape[0] // (2 * s2)):
        i = ii * 2 * s2
        v0 = np.empty(4, dtype=np.complex128)
        v1 = np.empty(4, dtype=np.complex128)
        for j in range(0, s2, 2 * s1):
            for k in range(s1):
                l = i + j + k
                v0[0] = psi[l]
                v0[1] = psi[l + s1]
                v0[2] = psi[l + s2]
                v0[3] = psi[l + s1 + s2]
                for r in range(4):
                    acc = 0j
                    for s in range(4):
                        acc += m[r, s] * v0[s]
                    v1[r] = acc
                psi[l] = v1[0]
                psi[l + s1] = v1[1]
                psi[l + s2] = v1[2]
                psi[l + s1 + s2] = v1[3]


def apply_2q_numpy(psi, q1, q2, m):
    v = psi.reshape(-1, 2, 1 << (q2 - q1 - 1), 2, 1 << q1)
    v[...] = np.einsum("pqrs,irjsk->ipjqk", m.reshape(2, 2, 2, 2), v)


# ------------------------------------------------------------ shuffling ---

@njit
def shuffle_numba(perm, u):
    # Fisher-Yates from the top; u[i] picks j in [0, i].
    for i in range(perm.shape[0] - 1, 0, -1):
        j = int(u[i] * (i + 1))
        t = perm[i]
        perm[i] = perm[j]
        perm[j] = t


def shuffle_numpy(perm, u):
    picks = (u * (np.arange(perm.shape[0]) + 1)).astype(np.int64)
    p = perm.tolist()
    for i in range(len(p) - 1, 0, -1):
        j = picks[i]
        p[i], p[j] = p[j], p[i]
    perm[:] = p


# ------------------------------------------------- Walsh-Hadamard -------

@njit
def fwht_numba(a):
    size = a.shape[0]
    h = 1
    while h < size:
        for i in range(0, size, 2 * h):
            for j in range(i, i + h):
                x = a[j]
                y = a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h *= 2


def fwht_numpy(a):
    h = 1
    while h < a.shape[0]:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = x - v[:, 1, :]
        h *= 2


# --------------------------------------------- autoregressive tables ------

@njit
def ar_counts_numba(samples, n, k, offsets, ones, totals):
    for c in range(samples.shape[0]):
        s = samples[c]
        for t in range(n):
            width = min(t, k)
            ctx = (s >> (t - width)) & ((1 << width) - 1)
            key = offsets[t] + ctx
            totals[key] += 1
            ones[key] += (s >> t) & 1


def ar_counts_numpy(samples, n, k, offsets, ones, totals):
    for t in range(n):
        width = min(t, k)
        ctx = (samples >> (t - width)) & ((1 << width) - 1)
        size = 1 << width
        lo = offsets[t]
        totals[lo:lo + size] += np.bincount(ctx, minlength=size)
        ones[lo:lo + size] += np.bincount(ctx, weights=(samples >> t) & 1,
                                          minlength=size).astype(np.int64)


@njit
def ar_generate_numba(p1, offsets, n, k, u, out):
    for c in range(out.shape[0]):
        s = 0
        for t in range(n):
            width = min(t, k)
            ctx = (s >> (t - width)) & ((1 << width) - 1)
            if u[c, t] < p1[offsets[t] + ctx]:
                s |= 1 << t
        out[c] = s


def ar_generate_numpy(p1, offsets, n, k, u, out):
    s = np.zeros(out.shape[0], dtype=np.int64)
    for t in range(n):
        width = min(t, k)
        ctx = (s >> (t - width)) & ((1 << width) - 1)
        s |= (u[:, t] < p1[offsets[t] + ctx]).astype(np.int64) << t
    out[:] = s


# ------------------------------------------------------ DBM latent sum ----

@njit
def latent_sum_numba(hfield, dfield, wp):
    """Sum of exp(h.hfield + d.dfield + h.wp.d) over h, d in {-1, +1}."""
    n_h = hfield.shape[0]
    n_d = dfield.shape[0]
    total = 0j
    eff = np.empty(n_h, dtype=np.complex128)
    h = np.empty(n_h, dtype=np.int64)
    for dd in range(1 << n_d):
        e_d = 0j
        for j in range(n_h):
            eff[j] = hfield[j]
        for kk in range(n_d):
            dk = 1.0 if (dd >> kk) & 1 else -1.0
            e_d += dk * dfield[kk]
            for j in range(n_h):
                eff[j] += dk * wp[j, kk]
        energy = e_d
        for j in range(n_h):
            h[j] = -1
            energy -= eff[j]
        total += np.exp(energy)
        # Gray-code walk: one hidden unit flips per step.
        for step in range(1, 1 << n_h):
            j = 0
            while not (step >> j) & 1:
                j += 1
            if h[j] < 0:
                energy += 2.0 * eff[j]
            else:
                energy -= 2.0 * eff[j]
            h[j] = -h[j]
            total += np.exp(energy)
    return total


def _spin_configs(count: int) -> np.ndarray:
    idx = np.arange(1 << count)[:, None]
    return np.where((idx >> np.arange(count)) & 1, 1.0, -1.0)


def latent_sum_numpy(hfield, dfield, wp):
    n_h = hfield.shape[0]
    n_d = dfield.shape[0]
    hconf = _spin_configs(n_h)
    dconf = _spin_configs(n_d)
    base = hconf @ hfield
    block = max(1, (1 << 20) >> n_h)
    total = 0j
    for lo in range(0, dconf.shape[0], block):
        dc = dconf[lo:lo + block]
        cross = hconf @ (wp @ dc.T) if n_h and n_d else np.zeros((hconf.shape[0], dc.shape[0]))
        energy = base[:, None] + cross + (dc @ dfield)[None, :]
        total += np.exp(energy).sum()
    return complex(total)


# ------------------------------------------------------------- dispatch ---

if USE_NUMBA:
    xorshift_fill = xorshift_fill_numba
    apply_1q = apply_1q_numba
    apply_2q = apply_2q_numba
    shuffle = shuffle_numba
    fwht = fwht_numba
    ar_counts = ar_counts_numba
    ar_generate = ar_generate_numba
    latent_sum = latent_sum_numba
else:
    xorshift_fill = xorshift_fill_numpy
    apply_1q = apply_1q_numpy
    apply_2q = apply_2q_numpy
    shuffle = shuffle_numpy
    fwht = fwht_numpy
    ar_counts = ar_counts_numpy
    ar_generate = ar_generate_numpy
    latent_sum = latent_sum_numpy


def uniform_from_bits(words: np.ndarray) -> np.ndarray:
    """Top 53 bits of each word as a double in [0, 1)."""
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


__all__ = [
    "xorshift_fill", "apply_1q", "apply_2q", "shuffle", "fwht", "ar_counts",
    "ar_generate", "latent_sum", "uniform_from_bits",
]
