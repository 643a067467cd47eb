import random

import numpy as np
import pytest

from polyaurn import (
    available_kernels,
    dirac,
    initial_state,
    make_urn,
    normalized_composition,
    product,
    run,
    run_replicas,
    scalar_urn,
    slowed_embedding,
    step,
    unit_urn,
)
from polyaurn.errors import AlreadyExtinct, NotASlowedProduct, ZeroSteps
from polyaurn.rng import RNG_NAME, Xoshiro256StarStar
from polyaurn.sampling import UrnSamplerConfig, random_urn
from polyaurn.simulate import read_trace, write_trace

both_kernels = pytest.mark.parametrize("kernel", available_kernels())


def test_scalar_urn_state_never_changes():
    urn = scalar_urn(1)
    state = initial_state(urn)
    rng = Xoshiro256StarStar(0)
    for _ in range(20):
        state, colour, atom = step(urn, state, rng)
        assert state.counts == (1,)
        assert colour == 0 and atom == 0
    assert state.step == 20


def test_step_frequencies_classic(classic):
    rng = Xoshiro256StarStar(123)
    start = initial_state(classic)
    outcomes = {(2, 1): 0, (1, 2): 0}
    n = 20_000
    for _ in range(n):
        state, _, _ = step(classic, start, rng)
        outcomes[state.counts] += 1
    for count in outcomes.values():
        assert abs(count - n / 2) < 5 * (n * 0.25) ** 0.5


def test_step_until_extinction():
    urn = make_urn(1, [dirac((-1,))], [1], [1])
    state = initial_state(urn)
    state, _, _ = step(urn, state, Xoshiro256StarStar(0))
    assert state.counts == (0,)
    assert state.extinct
    with pytest.raises(AlreadyExtinct):
        step(urn, state, Xoshiro256StarStar(0))


def test_run_zero_steps(classic):
    trace = run(classic, 0, seed=5)
    assert trace.final.step == 0
    assert list(trace.snapshot_steps) == [0]
    assert tuple(trace.snapshot_counts[0]) == classic.initial


@both_kernels
def test_run_deterministic(classic, kernel):
    t1 = run(classic, 5000, seed=99, snapshot_stride=100, record_draws=True, kernel=kernel)
    t2 = run(classic, 5000, seed=99, snapshot_stride=100, record_draws=True, kernel=kernel)
    assert t1.final == t2.final
    assert np.array_equal(t1.snapshot_counts, t2.snapshot_counts)
    assert np.array_equal(t1.draws.colours, t2.draws.colours)
    assert t1.rng_name == RNG_NAME


def test_classic_total_grows_one_per_draw(classic):
    trace = run(classic, 10**6, seed=1)
    assert sum(trace.final.counts) == 10**6 + 2


@pytest.mark.skipif(len(available_kernels()) < 2, reason="compiled kernel not built")
def test_kernel_parity(friedman):
    prod = product(friedman, friedman)
    a = run(prod, 30_000, seed=77, snapshot_stride=1, record_draws=True, kernel="cython")
    b = run(prod, 30_000, seed=77, snapshot_stride=1, record_draws=True, kernel="python")
    assert a.final == b.final
    assert np.array_equal(a.snapshot_steps, b.snapshot_steps)
    assert np.array_equal(a.snapshot_counts, b.snapshot_counts)
    assert np.array_equal(a.draws.colours, b.draws.colours)
    assert np.array_equal(a.draws.atoms, b.draws.atoms)
    assert np.array_equal(a.draws.sides, b.draws.sides)


def test_run_matches_repeated_step(friedman):
    prod = product(friedman, scalar_urn(1))
    trace = run(prod, 200, seed=11, snapshot_stride=1, record_draws=True)
    rng = Xoshiro256StarStar(11)
    state = initial_state(prod)
    for n in range(200):
        state, colour, atom = step(prod, state, rng)
        assert tuple(trace.snapshot_counts[n + 1]) == state.counts
        assert trace.draws.colours[n] == colour
        assert trace.draws.atoms[n] == atom


def test_run_stops_at_extinction():
    urn = make_urn(1, [dirac((-1,))], [1], [3])
    trace = run(urn, 100, seed=3)
    assert trace.final.step == 3
    assert trace.final.counts == (0,)
    assert trace.extinct


def test_extinct_at_start():
    trace = run(unit_urn(), 50, seed=0)
    assert trace.final.step == 0
    assert trace.extinct
    with pytest.raises(ZeroSteps):
        normalized_composition(trace)


def test_counts_never_negative_and_accounting():
    rng = random.Random(19)
    cfg = UrnSamplerConfig(min_colours=1, max_colours=3)
    for trial in range(10):
        urn = random_urn(rng, cfg)
        trace = run(urn, 300, seed=trial, snapshot_stride=1, record_draws=True)
        assert (trace.snapshot_counts >= 0).all()
        for n in range(trace.final.step):
            colour = int(trace.draws.colours[n])
            atom = int(trace.draws.atoms[n])
            increment = urn.measures[colour].atoms[atom][0]
            delta = trace.snapshot_counts[n + 1] - trace.snapshot_counts[n]
            assert tuple(delta) == increment


def test_normalized_composition_friedman_product(friedman):
    prod = product(friedman, friedman)
    comp = normalized_composition(run(prod, 10**5, seed=2))
    assert comp == pytest.approx(np.full(4, 0.25), rel=0.05)
    assert comp.sum() == pytest.approx(1.0, rel=0.01)


def test_replicas_deterministic_and_worker_independent(friedman):
    prod = product(friedman, friedman)
    serial = run_replicas(prod, 2000, seed=5, replicas=4)
    threaded = run_replicas(prod, 2000, seed=5, replicas=4, workers=4)
    assert [t.final for t in serial] == [t.final for t in threaded]
    assert len({t.seed for t in serial}) == 4


def test_compiled_tables_distinguish_product_metadata(friedman):
    # product(u, unit_urn()) equals u as a value but samples through the
    # mixture events; running the plain urn first must not poison the
    # table cache for the product urn
    run(friedman, 10, seed=1)
    prod = product(friedman, scalar_urn(0))
    assert prod == friedman
    trace = run(prod, 50, seed=1, snapshot_stride=1, record_draws=True)
    assert (trace.draws.sides == 0).all()


def test_slowed_embedding_alpha_zero(friedman):
    prod = product(friedman, scalar_urn(0))
    trace = run(prod, 500, seed=21, snapshot_stride=1, record_draws=True)
    tau, embedded = slowed_embedding(trace)
    assert np.array_equal(tau, np.arange(1, 501))
    assert np.array_equal(embedded.snapshot_counts, trace.snapshot_counts)


def test_slowed_embedding_half_rate(friedman):
    prod = product(friedman, scalar_urn(1))
    n = 10_000
    trace = run(prod, n, seed=23, snapshot_stride=1, record_draws=True)
    tau, embedded = slowed_embedding(trace)
    fraction = len(tau) / n
    assert abs(fraction - 0.5) < 5 * (0.25 / n) ** 0.5
    assert embedded.urn == friedman
    assert embedded.final.step == len(tau)
    # embedded process grows by one ball per embedded step
    assert sum(embedded.final.counts) == 2 + len(tau)


def test_slowed_embedding_errors(friedman):
    with pytest.raises(NotASlowedProduct):
        slowed_embedding(run(friedman, 10, seed=1, snapshot_stride=1, record_draws=True))
    prod = product(friedman, scalar_urn(1))
    with pytest.raises(NotASlowedProduct):
        slowed_embedding(run(prod, 10, seed=1, snapshot_stride=1))
    with pytest.raises(NotASlowedProduct):
        slowed_embedding(run(prod, 10, seed=1, record_draws=True))
    not_inert = product(friedman, friedman)
    with pytest.raises(NotASlowedProduct):
        slowed_embedding(run(not_inert, 10, seed=1, snapshot_stride=1, record_draws=True))


def test_state_at_and_draw_log_len(classic):
    trace = run(classic, 100, seed=9, snapshot_stride=10, record_draws=True)
    first = trace.state_at(0)
    assert first.counts == classic.initial and first.step == 0
    last = trace.state_at(len(trace.snapshot_steps) - 1)
    assert last == trace.final
    assert len(trace.draws) == 100


def test_trace_roundtrip(tmp_path, classic):
    trace = run(classic, 100, seed=9, snapshot_stride=10)
    path = tmp_path / "trace.jsonl"
    write_trace(trace, path)
    header, steps, counts = read_trace(path)
    assert header["seed"] == 9
    assert header["rng"] == RNG_NAME
    assert header["final_step"] == 100
    assert np.array_equal(steps, trace.snapshot_steps)
    assert np.array_equal(counts, trace.snapshot_counts)
