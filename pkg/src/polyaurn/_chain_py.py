"""Pure-Python urn chain kernel; the fallback for polyaurn._chain.

Both kernels implement the identical stepping contract:

  * total activity weight W = sum_i act_w[i] * counts[i]; W == 0 stops the
    chain (essential extinction) before consuming randomness;
  * the drawn colour is the first index whose cumulative weight exceeds one
    bounded draw in [0, W), scanning colours in order;
  * a colour with a single sampler event applies it without randomness;
    otherwise one bounded draw in [0, ev_tot[colour]) selects the event by
    cumulative scan in event order;
  * the event's increment (CSR rows inc_off/inc_idx/inc_val) is applied and
    W is updated incrementally;
  * after the step, if snap_stride > 0 and the absolute step number is a
    multiple of snap_stride, the counts are recorded.

All weights are exact integers (activities and probabilities scaled by
common denominators), so sampling carries no floating-point bias and the
compiled and pure kernels agree bit for bit.
"""

from __future__ import annotations

KERNEL_NAME = "python"

_MASK = (1 << 64) - 1


def _xoshiro_next(s):
    # s is a 4-element list, updated in place; returns the next output.
    v = (s[1] * 5) & _MASK
    result = ((((v << 7) | (v >> 57)) & _MASK) * 9) & _MASK
    t = (s[1] << 17) & _MASK
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = ((s[3] << 45) | (s[3] >> 19)) & _MASK
    return result


def run_chain(
    counts,
    act_w,
    ev_off,
    ev_w,
    ev_tot,
    ev_atom,
    ev_side,
    inc_off,
    inc_idx,
    inc_val,
    rng_state,
    n_steps,
    start_step,
    snap_stride,
    snap_steps,
    snap_counts,
    log_colour,
    log_atom,
    log_side,
):
    """Advance the chain by up to n_steps; returns (steps_done, n_snaps, W).

    counts and rng_state are updated in place; snapshots and the draw log
    (when log arrays are non-empty) are filled from index 0.
    """
    q = len(counts)
    x = [int(v) for v in counts]
    w = [int(v) for v in act_w]
    off = [int(v) for v in ev_off]
    eww = [int(v) for v in ev_w]
    tot = [int(v) for v in ev_tot]
    ioff = [int(v) for v in inc_off]
    iidx = [int(v) for v in inc_idx]
    ival = [int(v) for v in inc_val]
    state = [int(v) for v in rng_state]
    logging = len(log_colour) > 0

    def randbelow(bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            v = _xoshiro_next(state)
            if v >= threshold:
                return v % bound

    total = 0
    for i in range(q):
        total += w[i] * x[i]

    steps_done = 0
    n_snaps = 0
    for t_i in range(n_steps):
        if total == 0:
            break
        r = randbelow(total)
        c = 0
        acc = w[0] * x[0]
        while r >= acc:
            c += 1
            acc += w[c] * x[c]
        e = off[c]
        if off[c + 1] - e > 1:
            r2 = randbelow(tot[c])
            acc2 = eww[e]
            while r2 >= acc2:
                e += 1
                acc2 += eww[e]
        for p in range(ioff[e], ioff[e + 1]):
            j = iidx[p]
            d = ival[p]
            x[j] += d
            total += w[j] * d
        steps_done += 1
        if logging:
            log_colour[t_i] = c
            log_atom[t_i] = ev_atom[e]
            log_side[t_i] = ev_side[e]
        if snap_stride > 0 and (start_step + steps_done) % snap_stride == 0:
            snap_steps[n_snaps] = start_step + steps_done
            for i in range(q):
                snap_counts[n_snaps, i] = x[i]
            n_snaps += 1

    for i in range(q):
        counts[i] = x[i]
    for i in range(4):
        rng_state[i] = state[i]
    return steps_done, n_snaps, total


def rng_stream(rng_state, n, out):
    """Emit n raw generator outputs (for cross-kernel parity tests)."""
    state = [int(v) for v in rng_state]
    for k in range(n):
        out[k] = _xoshiro_next(state)
    for i in range(4):
        rng_state[i] = state[i]
