"""Seeded Monte Carlo realization of the urn Markov chain.

A ball is drawn with probability proportional to activity times count, a
replacement event is sampled from the drawn colour's measure, and the
increment is applied; the chain stops at the step budget or at essential
extinction (total activity weight zero). Sampling uses exact integer
weights throughout, and the generator is the package's own xoshiro256**,
so a (urn, seed, n_steps) triple determines the trace bit for bit.

The stepping loop is the package's only hot path. It has two
implementations selected at import time: the compiled polyaurn._chain
extension and the pure-Python polyaurn._chain_py fallback (forced by
setting POLYAURN_PURE_PYTHON=1). Both obey the same contract and produce
identical traces; benchmarks/bench_kernels.py compares their speed.

For product urns the sampler works on the mixture decomposition recorded
at construction, so every logged draw carries which factor the ball
evolved by. That in turn supports the slowed-urn embedding: in
product(u, scalar_urn(alpha)) the right-side draws return the ball
unchanged, and the chain observed at the left-side draw times has the
distribution of u's own chain.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import lcm
from typing import Optional

import numpy as np

from .errors import AlreadyExtinct, NotASlowedProduct, PolyaUrnError, ZeroSteps
from .rng import RNG_NAME, Xoshiro256StarStar, child_seed, seed_state
from .urn import PolyaUrn, urn_hash
from . import _chain_py

try:
    from . import _chain as _chain_c
except ImportError:  # extension not built
    _chain_c = None

_FORCE_PURE = os.environ.get("POLYAURN_PURE_PYTHON", "") not in ("", "0")

_WEIGHT_CAP = 1 << 31


def available_kernels() -> tuple[str, ...]:
    return ("cython", "python") if _chain_c is not None else ("python",)


def default_kernel() -> str:
    return "python" if (_chain_c is None or _FORCE_PURE) else "cython"


def _impl(kernel: Optional[str]):
    name = kernel or default_kernel()
    if name == "cython":
        if _chain_c is None:
            raise PolyaUrnError("compiled kernel requested but not built")
        return _chain_c
    if name == "python":
        return _chain_py
    raise ValueError(f"unknown kernel {name!r}")


# -- urn compilation ---------------------------------------------------------


@dataclass(frozen=True)
class _Tables:
    act_w: np.ndarray
    ev_off: np.ndarray
    ev_w: np.ndarray
    ev_tot: np.ndarray
    ev_atom: np.ndarray
    ev_side: np.ndarray
    inc_off: np.ndarray
    inc_idx: np.ndarray
    inc_val: np.ndarray
    max_step_gain: int


def _compile_urn(urn: PolyaUrn) -> _Tables:
    # urn equality ignores product metadata (a product with an inert factor
    # equals its other factor), but the sampler tables depend on it, so the
    # cache must key on both.
    return _compile_urn_cached(urn, urn.product_meta)


@lru_cache(maxsize=128)
def _compile_urn_cached(urn: PolyaUrn, _meta) -> _Tables:
    """Integer sampling tables: activities scaled by their common
    denominator, per-colour event weights scaled by theirs."""
    q = urn.colour_count
    act_den = lcm(*(a.denominator for a in urn.activities)) if q else 1
    act_w = [int(a * act_den) for a in urn.activities]
    if any(w >= _WEIGHT_CAP for w in act_w):
        raise PolyaUrnError("activity weights too large for the integer sampler")

    if urn.product_meta is not None:
        events_per_colour = [
            [(ev.side, ev.atom, ev.weight) for ev in evs]
            for evs in urn.product_meta.events
        ]
    else:
        events_per_colour = [
            [(-1, k, p) for k, (_, p) in enumerate(m.atoms)] for m in urn.measures
        ]

    ev_off = [0]
    ev_w: list[int] = []
    ev_tot = []
    ev_atom: list[int] = []
    ev_side: list[int] = []
    inc_off = [0]
    inc_idx: list[int] = []
    inc_val: list[int] = []
    max_gain = 0
    for i in range(q):
        events = events_per_colour[i]
        den = lcm(*(wt.denominator for _, _, wt in events))
        if den >= _WEIGHT_CAP:
            raise PolyaUrnError("event weights too large for the integer sampler")
        scaled = [int(wt * den) for _, _, wt in events]
        if sum(scaled) != den:
            raise PolyaUrnError("event weights of a colour do not sum to one")
        for (side, atom, _), sw in zip(events, scaled):
            ev_w.append(sw)
            ev_atom.append(atom)
            ev_side.append(side)
            increment = urn.measures[i].atoms[atom][0]
            for j, v in enumerate(increment):
                if v:
                    inc_idx.append(j)
                    inc_val.append(v)
            inc_off.append(len(inc_idx))
            max_gain = max(max_gain, sum(v for v in increment if v > 0))
        ev_off.append(len(ev_w))
        ev_tot.append(den)

    return _Tables(
        act_w=np.array(act_w, dtype=np.int64),
        ev_off=np.array(ev_off, dtype=np.int64),
        ev_w=np.array(ev_w, dtype=np.int64),
        ev_tot=np.array(ev_tot, dtype=np.int64),
        ev_atom=np.array(ev_atom, dtype=np.int32),
        ev_side=np.array(ev_side, dtype=np.int8),
        inc_off=np.array(inc_off, dtype=np.int64),
        inc_idx=np.array(inc_idx, dtype=np.int32),
        inc_val=np.array(inc_val, dtype=np.int64),
        max_step_gain=max_gain,
    )


# -- trace types -------------------------------------------------------------


@dataclass(frozen=True)
class UrnState:
    counts: tuple[int, ...]
    step: int
    extinct: bool


@dataclass(frozen=True)
class DrawLog:
    """Per-step draw record: drawn colour, merged atom index, mixture side
    (0 left factor, 1 right factor, -1 for non-product events)."""

    colours: np.ndarray
    atoms: np.ndarray
    sides: np.ndarray

    def __len__(self) -> int:
        return len(self.colours)


@dataclass(frozen=True)
class SimulationTrace:
    urn: PolyaUrn
    seed: int
    rng_name: str
    kernel: str
    snapshot_steps: np.ndarray
    snapshot_counts: np.ndarray
    draws: Optional[DrawLog]
    final: UrnState

    @property
    def extinct(self) -> bool:
        return self.final.extinct

    def state_at(self, index: int) -> UrnState:
        step = int(self.snapshot_steps[index])
        counts = tuple(int(v) for v in self.snapshot_counts[index])
        return UrnState(counts, step, step == self.final.step and self.extinct)


def initial_state(urn: PolyaUrn) -> UrnState:
    weight = urn.total_activity_weight(urn.initial)
    return UrnState(urn.initial, 0, weight == 0)


def _check_weight_headroom(tables: _Tables, counts, n_steps: int) -> None:
    reachable = int(sum(counts)) + n_steps * tables.max_step_gain
    w_sum = int(tables.act_w.sum())
    if w_sum and reachable >= (1 << 62) // w_sum:
        raise PolyaUrnError("step budget could overflow the integer sampler")


def run(
    urn: PolyaUrn,
    n_steps: int,
    seed: int,
    snapshot_stride: int = 0,
    record_draws: bool = False,
    kernel: Optional[str] = None,
) -> SimulationTrace:
    """Simulate n_steps draws (stopping early at extinction).

    snapshot_stride > 0 records the counts at every stride-th step; the
    initial and final states are always present. record_draws retains the
    (colour, atom, side) log needed by the slowed-urn embedding.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    module = _impl(kernel)
    tables = _compile_urn(urn)
    q = urn.colour_count
    counts = np.array(urn.initial, dtype=np.int64)
    _check_weight_headroom(tables, counts, n_steps)
    rng_state = np.array(seed_state(seed), dtype=np.uint64)
    max_snaps = (n_steps // snapshot_stride + 1) if snapshot_stride > 0 else 0
    snap_steps = np.zeros(max_snaps, dtype=np.int64)
    snap_counts = np.zeros((max_snaps, q), dtype=np.int64)
    log_n = n_steps if record_draws else 0
    log_colour = np.zeros(log_n, dtype=np.int32)
    log_atom = np.zeros(log_n, dtype=np.int32)
    log_side = np.zeros(log_n, dtype=np.int8)

    steps_done, n_snaps, weight = module.run_chain(
        counts,
        tables.act_w,
        tables.ev_off,
        tables.ev_w,
        tables.ev_tot,
        tables.ev_atom,
        tables.ev_side,
        tables.inc_off,
        tables.inc_idx,
        tables.inc_val,
        rng_state,
        n_steps,
        0,
        snapshot_stride,
        snap_steps,
        snap_counts,
        log_colour,
        log_atom,
        log_side,
    )
    steps_done = int(steps_done)
    final = UrnState(tuple(int(v) for v in counts), steps_done, int(weight) == 0)

    steps = [np.array([0], dtype=np.int64)]
    count_rows = [np.array(urn.initial, dtype=np.int64).reshape(1, q)]
    if n_snaps:
        steps.append(snap_steps[:n_snaps])
        count_rows.append(snap_counts[:n_snaps])
    all_steps = np.concatenate(steps)
    all_counts = np.concatenate(count_rows)
    if steps_done and (not len(all_steps) or all_steps[-1] != steps_done):
        all_steps = np.append(all_steps, steps_done)
        all_counts = np.vstack([all_counts, counts])
    draws = None
    if record_draws:
        draws = DrawLog(
            colours=log_colour[:steps_done].copy(),
            atoms=log_atom[:steps_done].copy(),
            sides=log_side[:steps_done].copy(),
        )
    return SimulationTrace(
        urn=urn,
        seed=seed,
        rng_name=RNG_NAME,
        kernel=module.KERNEL_NAME,
        snapshot_steps=all_steps,
        snapshot_counts=all_counts,
        draws=draws,
        final=final,
    )


def step(urn: PolyaUrn, state: UrnState, rng: Xoshiro256StarStar):
    """One draw from the chain; returns (new state, colour, atom index).

    Advances the caller's generator exactly as a kernel run would, so a
    sequence of step calls reproduces the corresponding prefix of run().
    """
    tables = _compile_urn(urn)
    counts = np.array(state.counts, dtype=np.int64)
    if urn.total_activity_weight(state.counts) == 0:
        raise AlreadyExtinct(f"state at step {state.step} is essentially extinct")
    rng_state = np.array(rng.state, dtype=np.uint64)
    log_colour = np.zeros(1, dtype=np.int32)
    log_atom = np.zeros(1, dtype=np.int32)
    log_side = np.zeros(1, dtype=np.int8)
    empty = np.zeros(0, dtype=np.int64)
    steps_done, _, weight = _chain_py.run_chain(
        counts,
        tables.act_w,
        tables.ev_off,
        tables.ev_w,
        tables.ev_tot,
        tables.ev_atom,
        tables.ev_side,
        tables.inc_off,
        tables.inc_idx,
        tables.inc_val,
        rng_state,
        1,
        state.step,
        0,
        empty,
        empty.reshape(0, urn.colour_count),
        log_colour,
        log_atom,
        log_side,
    )
    assert steps_done == 1
    rng.state = [int(v) for v in rng_state]
    new_state = UrnState(
        tuple(int(v) for v in counts), state.step + 1, int(weight) == 0
    )
    return new_state, int(log_colour[0]), int(log_atom[0])


def run_replicas(
    urn: PolyaUrn,
    n_steps: int,
    seed: int,
    replicas: int,
    snapshot_stride: int = 0,
    record_draws: bool = False,
    kernel: Optional[str] = None,
    workers: int = 1,
) -> list[SimulationTrace]:
    """Independent replicas on derived child streams; replica k is seeded
    with child_seed(seed, k), so results do not depend on worker count."""
    seeds = [child_seed(seed, k) for k in range(replicas)]

    def one(s: int) -> SimulationTrace:
        return run(urn, n_steps, s, snapshot_stride, record_draws, kernel)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def normalized_composition(trace: SimulationTrace) -> np.ndarray:
    """Final counts divided by the final step number."""
    if trace.final.step == 0:
        raise ZeroSteps("trace has no steps to normalize by")
    return np.array(trace.final.counts, dtype=float) / trace.final.step


# -- slowed-urn embedding ----------------------------------------------------


def slowed_embedding(trace: SimulationTrace):
    """Stopping-time embedding for traces of product(u, scalar_urn(alpha)).

    tau(k) is the step at which the k-th left-side draw happened. Returns
    (tau, embedded) where embedded is a trace of the left factor whose k-th
    snapshot is the product state at tau(k); between consecutive tau values
    the product state is constant because right-side draws return the ball
    unchanged.
    """
    meta = trace.urn.product_meta
    if meta is None:
        raise NotASlowedProduct("trace urn is not a product")
    if meta.right.colour_count != 1 or not meta.right.measures[0].is_dirac_at_zero():
        raise NotASlowedProduct("right factor is not a one-colour inert urn")
    if trace.draws is None:
        raise NotASlowedProduct("trace has no draw log")
    steps = trace.snapshot_steps
    n = trace.final.step
    if len(steps) != n + 1 or int(steps[-1]) != n or not np.array_equal(
        steps, np.arange(n + 1)
    ):
        raise NotASlowedProduct("trace needs snapshot_stride=1 for the embedding")

    left_mask = trace.draws.sides == 0
    tau = np.flatnonzero(left_mask).astype(np.int64) + 1
    changed = np.flatnonzero(
        (trace.snapshot_counts[1:] != trace.snapshot_counts[:-1]).any(axis=1)
    ) + 1
    if not np.isin(changed, tau).all():
        raise AssertionError("state changed at a step without a left-side draw")

    sub_steps = np.concatenate([[0], tau])
    sub_counts = trace.snapshot_counts[sub_steps]
    left = meta.left
    final_counts = tuple(int(v) for v in sub_counts[-1])
    final = UrnState(
        final_counts,
        len(tau),
        left.total_activity_weight(final_counts) == 0,
    )
    embedded = SimulationTrace(
        urn=left,
        seed=trace.seed,
        rng_name=trace.rng_name,
        kernel=trace.kernel,
        snapshot_steps=np.arange(len(tau) + 1, dtype=np.int64),
        snapshot_counts=sub_counts,
        draws=None,
        final=final,
    )
    return tau, embedded


# -- trace files -------------------------------------------------------------


def write_trace(trace: SimulationTrace, path) -> None:
    """JSON-lines export: one metadata header, then one snapshot per line."""
    header = {
        "seed": trace.seed,
        "rng": trace.rng_name,
        "kernel": trace.kernel,
        "urn_hash": urn_hash(trace.urn),
        "colours": [trace.urn.colour_name(i) for i in range(trace.urn.colour_count)],
        "extinct": trace.extinct,
        "final_step": trace.final.step,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for row in range(len(trace.snapshot_steps)):
            fh.write(
                json.dumps(
                    {
                        "step": int(trace.snapshot_steps[row]),
                        "counts": [int(v) for v in trace.snapshot_counts[row]],
                    }
                )
                + "\n"
            )


def read_trace(path):
    """Parse a JSON-lines trace file into (header, steps, counts)."""
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    header = lines[0]
    steps = np.array([entry["step"] for entry in lines[1:]], dtype=np.int64)
    counts = np.array([entry["counts"] for entry in lines[1:]], dtype=np.int64)
    return header, steps, counts
