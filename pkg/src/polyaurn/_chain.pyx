# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled urn chain kernel.

Mirrors polyaurn._chain_py exactly: same xoshiro256** recurrence, same
top-block rejection for bounded draws, same stepping order. Any divergence
between the two kernels is a bug; the test suite compares their traces bit
for bit.
"""

from libc.stdint cimport int8_t, int32_t, int64_t, uint64_t

KERNEL_NAME = "cython"


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _xoshiro_next(uint64_t *s) noexcept nogil:
    cdef uint64_t result = _rotl(s[1] * 5UL, 7) * 9UL
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline uint64_t _randbelow(uint64_t *s, uint64_t bound) noexcept nogil:
    cdef uint64_t threshold = (0UL - bound) % bound
    cdef uint64_t v
    while True:
        v = _xoshiro_next(s)
        if v >= threshold:
            return v % bound


def run_chain(
    int64_t[::1] counts,
    int64_t[::1] act_w,
    int64_t[::1] ev_off,
    int64_t[::1] ev_w,
    int64_t[::1] ev_tot,
    int32_t[::1] ev_atom,
    int8_t[::1] ev_side,
    int64_t[::1] inc_off,
    int32_t[::1] inc_idx,
    int64_t[::1] inc_val,
    uint64_t[::1] rng_state,
    int64_t n_steps,
    int64_t start_step,
    int64_t snap_stride,
    int64_t[::1] snap_steps,
    int64_t[:, ::1] snap_counts,
    int32_t[::1] log_colour,
    int32_t[::1] log_atom,
    int8_t[::1] log_side,
):
    """Advance the chain by up to n_steps; returns (steps_done, n_snaps, W).

    counts and rng_state are updated in place; snapshots and the draw log
    (when log arrays are non-empty) are filled from index 0.
    """
    cdef Py_ssize_t q = counts.shape[0]
    cdef bint logging = log_colour.shape[0] > 0
    cdef uint64_t s[4]
    cdef int64_t total = 0
    cdef int64_t steps_done = 0
    cdef int64_t n_snaps = 0
    cdef int64_t t_i, r, acc, r2, acc2, e, p, d
    cdef Py_ssize_t i, c, j

    for i in range(4):
        s[i] = rng_state[i]
    for i in range(q):
        total += act_w[i] * counts[i]

    with nogil:
        for t_i in range(n_steps):
            if total == 0:
                break
            r = <int64_t> _randbelow(s, <uint64_t> total)
            c = 0
            acc = act_w[0] * counts[0]
            while r >= acc:
                c += 1
                acc += act_w[c] * counts[c]
            e = ev_off[c]
            if ev_off[c + 1] - e > 1:
                r2 = <int64_t> _randbelow(s, <uint64_t> ev_tot[c])
                acc2 = ev_w[e]
                while r2 >= acc2:
                    e += 1
                    acc2 += ev_w[e]
            for p in range(inc_off[e], inc_off[e + 1]):
                j = inc_idx[p]
                d = inc_val[p]
                counts[j] += d
                total += act_w[j] * d
            steps_done += 1
            if logging:
                log_colour[t_i] = <int32_t> c
                log_atom[t_i] = ev_atom[e]
                log_side[t_i] = ev_side[e]
            if snap_stride > 0 and (start_step + steps_done) % snap_stride == 0:
                snap_steps[n_snaps] = start_step + steps_done
                for i in range(q):
                    snap_counts[n_snaps, i] = counts[i]
                n_snaps += 1

    for i in range(4):
        rng_state[i] = s[i]
    return steps_done, n_snaps, total


def rng_stream(uint64_t[::1] rng_state, Py_ssize_t n, uint64_t[::1] out):
    """Emit n raw generator outputs (for cross-kernel parity tests)."""
    cdef uint64_t s[4]
    cdef Py_ssize_t k, i
    for i in range(4):
        s[i] = rng_state[i]
    for k in range(n):
        out[k] = _xoshiro_next(s)
    for i in range(4):
        rng_state[i] = s[i]
