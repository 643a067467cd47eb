import math
import random

import numpy as np
import pytest

from polyaurn import (
    aggregate_B,
    check_assumption_preservation,
    check_assumptions,
    dominance_partition,
    intensity_matrix,
    largest_real_eigenvalue,
    limit_prediction,
    product,
    product_B_identities,
    product_partition_check,
    second_moment_matrix,
    unit_urn,
    zero_urn,
)
from polyaurn.analysis import basis_matrix
from polyaurn.errors import AssumptionsFail, NonRealTop
from polyaurn.intensity import kronecker_sum, mat, mat_pow
from polyaurn.sampling import UrnSamplerConfig, random_lively_urn, random_urn


def test_partition_classic(classic):
    part = dominance_partition(classic)
    assert part.classes == ((0,), (1,))
    assert part.dominating_class is None
    assert not part.dominates(0, 1) and not part.dominates(1, 0)


def test_partition_friedman(friedman):
    part = dominance_partition(friedman)
    assert part.classes == ((0, 1),)
    assert part.is_irreducible()
    assert part.dominating_class == 0


def test_partition_chain(chain_urn):
    part = dominance_partition(chain_urn)
    assert part.classes == ((0,), (1,))
    assert part.dominates(0, 1)
    assert not part.dominates(1, 0)
    assert part.dominating_class == 0


def test_partition_zero_urn():
    part = dominance_partition(zero_urn())
    assert part.classes == ()
    assert part.dominating_class is None


def dominates_by_powers(a, i, j):
    # oracle straight from the definition: some exact matrix power has a
    # positive (j, i) entry; powers up to the size suffice
    q = len(a)
    for n in range(q + 1):
        if mat_pow(a, n)[j][i] > 0:
            return True
    return False


def test_dominance_matches_matrix_power_oracle():
    rng = random.Random(83)
    cfg = UrnSamplerConfig(max_colours=5)
    for _ in range(30):
        urn = random_urn(rng, cfg)
        a = intensity_matrix(urn)
        part = dominance_partition(urn)
        for i in range(urn.colour_count):
            for j in range(urn.colour_count):
                expected = dominates_by_powers(a, i, j)
                assert part.dominates(part.class_of(i), part.class_of(j)) == expected


def test_product_partition_check_pairs(classic, friedman):
    assert product_partition_check(friedman, friedman)
    assert dominance_partition(product(friedman, friedman)).is_irreducible()
    assert product_partition_check(classic, friedman)
    assert product_partition_check(classic, classic)


def test_product_partition_with_unit(classic, friedman, chain_urn):
    for urn in (classic, friedman, chain_urn):
        assert product_partition_check(urn, unit_urn())
        assert product_partition_check(unit_urn(), urn)


def test_product_partition_random():
    rng = random.Random(89)
    cfg = UrnSamplerConfig(max_colours=3)
    for _ in range(30):
        assert product_partition_check(random_urn(rng, cfg), random_urn(rng, cfg))


def test_largest_real_eigenvalue_identity():
    lam, mult, _ = largest_real_eigenvalue(mat([[1, 0], [0, 1]]))
    assert lam == pytest.approx(1.0)
    assert mult == 2


def test_largest_real_eigenvalue_friedman(friedman):
    lam, mult, v = largest_real_eigenvalue(intensity_matrix(friedman))
    assert lam == pytest.approx(1.0)
    assert mult == 1
    assert v == pytest.approx(np.array([1, 1]) / math.sqrt(2))


def test_largest_real_eigenvalue_defective():
    lam, mult, v = largest_real_eigenvalue(mat([[1, 1], [0, 1]]))
    assert lam == pytest.approx(1.0, abs=1e-6)
    assert mult == 2
    assert v == pytest.approx(np.array([1.0, 0.0]), abs=1e-6)


def test_non_real_top_raises():
    with pytest.raises(NonRealTop):
        largest_real_eigenvalue(mat([[0, -1], [1, 0]]))


def test_assumptions_friedman(friedman):
    report = check_assumptions(friedman)
    assert report.all_hold
    assert report.lambda1 == pytest.approx(1.0)
    assert report.lambda2_real == pytest.approx(-1.0)
    assert report.multiplicity_lambda1 == 1


def test_assumptions_classic(classic):
    report = check_assumptions(classic)
    assert report.a1.holds and report.a2.holds and report.a3.holds
    assert not report.a4.holds
    assert not report.a6.holds
    assert report.first_failing() == "A4"


def test_assumptions_unit_urn():
    report = check_assumptions(unit_urn())
    assert not report.a3.holds
    assert report.lambda1 == pytest.approx(0.0)


def test_assumptions_zero_urn():
    report = check_assumptions(zero_urn())
    assert report.a1.holds and report.a2.holds
    assert not report.a3.holds
    assert report.lambda1 is None


def test_assumptions_chain(chain_urn):
    # lambda1 = 1 sits in the dominated class {1}, not the dominating {0}
    report = check_assumptions(chain_urn)
    assert report.a5.holds
    assert not report.a6.holds


def test_limit_prediction_friedman_squared(friedman):
    pred = limit_prediction(friedman, friedman)
    assert pred.lambda1_sum == pytest.approx(2.0)
    assert pred.S == pytest.approx(2.0)
    assert np.array(pred.limit) == pytest.approx(np.full(4, 0.25))
    assert np.array(pred.v) == pytest.approx(np.full(4, 0.25))


def test_limit_prediction_asymmetric(friedman, doubling_friedman):
    # doubling Friedman: lambda1 = 2 and v1 = (1/2, 1/2)
    lam, _, v = largest_real_eigenvalue(intensity_matrix(doubling_friedman))
    assert lam == pytest.approx(2.0)
    pred = limit_prediction(doubling_friedman, friedman)
    assert pred.lambda1_sum == pytest.approx(3.0)
    assert pred.S == pytest.approx(2.0)
    assert np.array(pred.limit) == pytest.approx(np.full(4, 0.375))


def test_limit_prediction_scaling_identity(friedman, doubling_friedman):
    # <a_product, v1 (x) v1'> equals S for the normalized eigenvectors
    pred = limit_prediction(doubling_friedman, friedman)
    prod = product(doubling_friedman, friedman)
    acts = np.array([float(a) for a in prod.activities])
    assert float(acts @ np.array(pred.v)) == pytest.approx(pred.S)


def test_limit_prediction_requires_assumptions(classic, friedman):
    with pytest.raises(AssumptionsFail) as exc:
        limit_prediction(classic, friedman)
    assert exc.value.assumption == "A4"
    assert exc.value.which == "left"


def test_aggregate_B(classic, friedman):
    inert = unit_urn()
    assert aggregate_B(inert, [1.0]) == pytest.approx(np.zeros((1, 1)))
    assert aggregate_B(classic, [0.5, 0.5]) == pytest.approx(np.diag([0.5, 0.5]))
    assert aggregate_B(friedman, [0.5, 0.5]) == pytest.approx(np.diag([0.5, 0.5]))


def test_basis_matrix():
    e = basis_matrix(2, 1, 1)
    assert e == ((0, 0), (0, 1))


def test_product_B_identity_with_unit(friedman):
    # with an inert right factor the weights collapse onto the left moments
    prod = product(friedman, unit_urn())
    for i in range(2):
        assert second_moment_matrix(prod, i) == second_moment_matrix(friedman, i)


def test_product_B_aggregate_needs_assumptions(classic, friedman):
    with pytest.raises(AssumptionsFail):
        product_B_identities(classic, friedman)


def test_product_B_identities_friedman(friedman):
    report = product_B_identities(friedman, friedman, tol=1e-9)
    assert report["per_colour_exact"]
    assert report["aggregate_close"]
    assert report["max_abs_error"] <= 1e-9


def test_product_B_per_colour_random():
    rng = random.Random(97)
    cfg = UrnSamplerConfig(max_colours=3)
    for _ in range(20):
        u, u2 = random_urn(rng, cfg), random_urn(rng, cfg)
        prod = product(u, u2)
        q, q2 = u.colour_count, u2.colour_count
        from polyaurn.intensity import kronecker_product, mat_add, mat_scale

        for i in range(q):
            for j in range(q2):
                lhs = second_moment_matrix(prod, i * q2 + j)
                denom = u.activities[i] + u2.activities[j]
                if denom == 0:
                    assert all(v == 0 for row in lhs for v in row)
                    continue
                rhs = mat_add(
                    mat_scale(
                        u.activities[i] / denom,
                        kronecker_product(
                            second_moment_matrix(u, i), basis_matrix(q2, j, j)
                        ),
                    ),
                    mat_scale(
                        u2.activities[j] / denom,
                        kronecker_product(
                            basis_matrix(q, i, i), second_moment_matrix(u2, j)
                        ),
                    ),
                )
                assert lhs == rhs


def test_product_eigenvalue_relations():
    rng = random.Random(101)
    cfg = UrnSamplerConfig(max_colours=3)
    checked = 0
    while checked < 12:
        u, u2 = random_lively_urn(rng, cfg), random_lively_urn(rng, cfg)
        ra, rb = check_assumptions(u), check_assumptions(u2)
        rp = check_assumptions(product(u, u2))
        assert rp.lambda1 == pytest.approx(ra.lambda1 + rb.lambda1, abs=1e-6)
        candidates = []
        if ra.lambda2_real is not None:
            candidates.append(ra.lambda2_real + rb.lambda1)
        if rb.lambda2_real is not None:
            candidates.append(ra.lambda1 + rb.lambda2_real)
        if candidates:
            assert rp.lambda2_real == pytest.approx(max(candidates), abs=1e-6)
        checked += 1


def test_binomial_dominance_entry(chain_urn, friedman):
    # for dominating pairs the single surviving binomial term is positive
    for u, u2 in ((chain_urn, friedman), (friedman, friedman)):
        a, a2 = intensity_matrix(u), intensity_matrix(u2)
        q, q2 = len(a), len(a2)
        ks = kronecker_sum(a, a2)
        for i in range(q):
            for k in range(q):
                ns = [n for n in range(q + 1) if mat_pow(a, n)[k][i] > 0]
                if not ns:
                    continue
                for j in range(q2):
                    for l in range(q2):
                        ms = [m for m in range(q2 + 1) if mat_pow(a2, m)[l][j] > 0]
                        if not ms:
                            continue
                        # n, m minimal: powers below them vanish exactly, so
                        # a single binomial term survives at power n + m
                        n, m = min(ns), min(ms)
                        entry = mat_pow(ks, n + m)[k * q2 + l][i * q2 + j]
                        expected = (
                            math.comb(n + m, m)
                            * mat_pow(a, n)[k][i]
                            * mat_pow(a2, m)[l][j]
                        )
                        assert entry == expected
                        assert entry > 0


def test_assumption_preservation_quick():
    report = check_assumption_preservation(trials=3, seed=12)
    assert report.all_passed, report.to_json()
