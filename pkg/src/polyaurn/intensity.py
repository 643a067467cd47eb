"""Intensity matrices and the matrix semiring under direct and Kronecker sums.

The intensity matrix of an urn has entry (i, j) equal to a_j times the
expected change of the colour-i count when a colour-j ball is drawn. Its
off-diagonal entries are nonnegative and A_ii >= -a_i. Square matrices with
nonnegative off-diagonals, taken up to permutation similarity, form a
commutative semiring with direct sum as addition and Kronecker sum as
multiplication; mapping an urn to its intensity matrix respects both
compositions exactly under the flat colour orderings used here.

All matrices in this module are tuples of tuples of exact Fractions;
floating point enters only in the spectra and analysis modules.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import LawReport, LawResult, disjoint_union, product, relabel
from .errors import SizeCapExceeded
from .rational import as_fraction, format_rational, parse_rational
from .urn import PolyaUrn, expected_replacement

RatMatrix = tuple[tuple[Fraction, ...], ...]
PermutationWitness = tuple[int, ...]

DEFAULT_PERM_CAP = 16

EMPTY: RatMatrix = ()


def mat(rows) -> RatMatrix:
    """Coerce nested sequences of ints/Fractions/"p/q" strings to a matrix."""
    out = tuple(tuple(as_fraction(v) for v in row) for row in rows)
    for row in out:
        if len(row) != len(out):
            raise ValueError("matrix is not square")
    return out


def identity_matrix(n: int) -> RatMatrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def mat_add(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a: RatMatrix) -> RatMatrix:
    c = as_fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n = len(a)
    m = len(b[0]) if b else 0
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), start=Fraction(0)) for j in range(m))
        for i in range(n)
    )


def mat_pow(a: RatMatrix, n: int) -> RatMatrix:
    if n < 0:
        raise ValueError("negative matrix power")
    result = identity_matrix(len(a))
    for _ in range(n):
        result = mat_mul(result, a)
    return result


def mat_to_float(a: RatMatrix) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in a], dtype=float).reshape(
        len(a), len(a)
    )


def is_intmat(a: RatMatrix) -> bool:
    """Membership test: all off-diagonal entries nonnegative."""
    return all(
        a[i][j] >= 0 for i in range(len(a)) for j in range(len(a)) if i != j
    )


def matrix_to_json(a: RatMatrix) -> list:
    return [[format_rational(v) for v in row] for row in a]


def matrix_from_json(doc) -> RatMatrix:
    return mat([[parse_rational(str(v)) for v in row] for row in doc])


# -- intensity of an urn -----------------------------------------------------


def intensity_matrix(urn: PolyaUrn) -> RatMatrix:
    """A[i][j] = a_j * E(change of colour-i count | colour j drawn)."""
    q = urn.colour_count
    means = [expected_replacement(urn, j) for j in range(q)]
    return tuple(
        tuple(urn.activities[j] * means[j][i] for j in range(q)) for i in range(q)
    )


# -- semiring operations -----------------------------------------------------


def direct_sum(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n, m = len(a), len(b)
    zero = Fraction(0)
    top = tuple(row + (zero,) * m for row in a)
    bottom = tuple((zero,) * n + row for row in b)
    return top + bottom


def kronecker_product(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n, m = len(a), len(b)
    return tuple(
        tuple(a[i][k] * b[j][l] for k in range(n) for l in range(m))
        for i in range(n)
        for j in range(m)
    )


def kronecker_sum(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    n, m = len(a), len(b)
    return mat_add(
        kronecker_product(a, identity_matrix(m)),
        kronecker_product(identity_matrix(n), b),
    )


def vector_boxplus(a: Sequence, b: Sequence) -> tuple:
    """All pairwise sums a_i + b_j in lexicographic order of (i, j)."""
    return tuple(x + y for x in a for y in b)


# -- permutation similarity --------------------------------------------------


def conjugate_by_permutation(a: RatMatrix, perm: Sequence[int]) -> RatMatrix:
    """P^{-1} A P where column j of P is the basis vector e_{perm[j]}."""
    return tuple(tuple(a[perm[i]][perm[j]] for j in range(len(a))) for i in range(len(a)))


def is_permutation_similar(b: RatMatrix, c: RatMatrix, perm: Sequence[int]) -> bool:
    """Exactly verify c = P^{-1} b P, i.e. c[i][j] == b[perm[i]][perm[j]]."""
    n = len(b)
    if len(c) != n or sorted(perm) != list(range(n)):
        return False
    return all(c[i][j] == b[perm[i]][perm[j]] for i in range(n) for j in range(n))


def _perm_fingerprint(a: RatMatrix, i: int):
    return (a[i][i], tuple(sorted(a[i])), tuple(sorted(row[i] for row in a)))


def permutation_similar(
    b: RatMatrix,
    c: RatMatrix,
    cap: int = DEFAULT_PERM_CAP,
    hint: Optional[Sequence[int]] = None,
) -> Optional[PermutationWitness]:
    """Search for a permutation witness of b ~ c, or None.

    The returned perm satisfies c[i][j] == b[perm[i]][perm[j]]. Backtracking
    is pruned by per-index invariants (diagonal entry, sorted row and column
    multisets); sizes above the cap raise SizeCapExceeded since the problem
    contains graph isomorphism.
    """
    n = len(b)
    if len(c) != n:
        return None
    if hint is not None and is_permutation_similar(b, c, hint):
        return tuple(hint)
    identity = tuple(range(n))
    if is_permutation_similar(b, c, identity):
        return identity
    if n > cap:
        raise SizeCapExceeded(f"permutation search on size {n} exceeds the cap of {cap}")
    fb = [_perm_fingerprint(b, i) for i in range(n)]
    fc = [_perm_fingerprint(c, i) for i in range(n)]
    if sorted(fb) != sorted(fc):
        return None
    candidates = [[y for y in range(n) if fb[y] == fc[x]] for x in range(n)]
    order = sorted(range(n), key=lambda x: len(candidates[x]))
    assign: list[Optional[int]] = [None] * n
    used = [False] * n

    def consistent(x: int, y: int) -> bool:
        for x2 in order:
            y2 = assign[x2]
            if y2 is None:
                continue
            if c[x][x2] != b[y][y2] or c[x2][x] != b[y2][y]:
                return False
        return True

    def backtrack(pos: int) -> Optional[PermutationWitness]:
        if pos == n:
            return tuple(assign)  # type: ignore[arg-type]
        x = order[pos]
        for y in candidates[x]:
            if used[y] or not consistent(x, y):
                continue
            assign[x] = y
            used[y] = True
            found = backtrack(pos + 1)
            if found is not None:
                return found
            assign[x] = None
            used[y] = False
        return None

    return backtrack(0)


# -- canonical witnesses for the matrix laws ---------------------------------


def block_swap_witness(p: int, q: int) -> PermutationWitness:
    """Witness for permutation_similar(A + B, B + A) under direct sum."""
    return tuple(range(p, p + q)) + tuple(range(p))


def kron_commutation_witness(p: int, q: int) -> PermutationWitness:
    """Witness for permutation_similar(A # B, B # A) under Kronecker sum;
    it depends only on the sizes p and q, not on the entries."""
    out = [0] * (p * q)
    for j in range(q):
        for i in range(p):
            out[j * p + i] = i * q + j
    return tuple(out)


def distribution_interleave_witness(p: int, q: int, r: int) -> PermutationWitness:
    """Witness for permutation_similar(A # (B + C), (A # B) + (A # C))."""
    out = [0] * (p * (q + r))
    for i in range(p):
        for j in range(q):
            out[i * q + j] = i * (q + r) + j
        for j in range(r):
            out[p * q + i * r + j] = i * (q + r) + q + j
    return tuple(out)


def direct_sum_perm(wp: Sequence[int], wq: Sequence[int]) -> PermutationWitness:
    p = len(wp)
    return tuple(wp) + tuple(p + t for t in wq)


def kron_perm(wp: Sequence[int], wq: Sequence[int]) -> PermutationWitness:
    q = len(wq)
    return tuple(wp[i] * q + wq[j] for i in range(len(wp)) for j in range(q))


# -- the intensity morphism --------------------------------------------------


def product_intensity_entry(u: PolyaUrn, u2: PolyaUrn, drawn, affected) -> Fraction:
    """Closed form for the product intensity entry at row (k, l), column
    (i, j): indicator(j == l) * A[k][i] + indicator(i == k) * A'[l][j]."""
    i, j = drawn
    k, l = affected
    a = intensity_matrix(u)
    a2 = intensity_matrix(u2)
    out = Fraction(0)
    if j == l:
        out += a[k][i]
    if i == k:
        out += a2[l][j]
    return out


def verify_phi_morphism(
    u: PolyaUrn,
    u2: PolyaUrn,
    rng: Optional[random.Random] = None,
    cap: int = DEFAULT_PERM_CAP,
) -> dict:
    """Check that intensity respects both compositions on a pair of urns.

    Exact checks: intensity(union) equals the direct sum, intensity(product)
    equals the Kronecker sum (both under the flat colour orderings), and the
    per-entry closed form reproduces every product entry. When an rng is
    given and sizes permit, the permutation search is additionally exercised
    on randomly relabelled copies.
    """
    from .sampling import random_permutation

    a = intensity_matrix(u)
    a2 = intensity_matrix(u2)
    report = {
        "union_exact": intensity_matrix(disjoint_union(u, u2)) == direct_sum(a, a2),
        "product_exact": intensity_matrix(product(u, u2)) == kronecker_sum(a, a2),
    }
    prod_a = intensity_matrix(product(u, u2))
    q, q2 = u.colour_count, u2.colour_count
    report["entry_formula"] = all(
        prod_a[k * q2 + l][i * q2 + j]
        == product_intensity_entry(u, u2, (i, j), (k, l))
        for i in range(q)
        for j in range(q2)
        for k in range(q)
        for l in range(q2)
    )
    report["relabelled_similar"] = None
    if rng is not None and 0 < q * q2 <= cap:
        phi = random_permutation(rng, q)
        psi = random_permutation(rng, q2)
        rel = intensity_matrix(product(relabel(u, phi), relabel(u2, psi)))
        witness = permutation_similar(kronecker_sum(a, a2), rel, cap=cap)
        report["relabelled_similar"] = witness is not None
    report["pass"] = all(v is not False for v in report.values())
    return report


# -- the matrix semiring laws ------------------------------------------------


def check_matrix_semiring_laws(
    trials: int, seed: int = 0, max_size: int = 3, cap: int = DEFAULT_PERM_CAP
) -> LawReport:
    """Randomized check of the direct-sum/Kronecker-sum semiring laws with
    explicit permutation witnesses, plus closure of the nonnegative
    off-diagonal class and well-definedness under conjugation."""
    from .sampling import random_permutation, random_rational_matrix

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    names = (
        "oplus_associative",
        "oplus_commutative",
        "oplus_neutral",
        "boxplus_associative",
        "boxplus_commutative",
        "boxplus_neutral",
        "boxplus_annihilates_zero",
        "distributive_left",
        "distributive_right",
        "intmat_closure",
        "conjugation_well_defined",
    )
    results = {name: LawResult(True, trials) for name in names}

    def fail(name, detail):
        if results[name].passed:
            results[name] = LawResult(False, trials, detail)

    def note(name, ok, *mats):
        if not ok:
            fail(name, {"law": name, "matrices": [matrix_to_json(m) for m in mats]})

    for _ in range(trials):
        a = random_rational_matrix(rng, rng.randint(0, max_size))
        b = random_rational_matrix(rng, rng.randint(0, max_size))
        c = random_rational_matrix(rng, rng.randint(0, max_size))
        p, q, r = len(a), len(b), len(c)

        note("oplus_associative", direct_sum(direct_sum(a, b), c) == direct_sum(a, direct_sum(b, c)), a, b, c)
        swapped = permutation_similar(direct_sum(a, b), direct_sum(b, a), cap=cap, hint=block_swap_witness(p, q))
        note("oplus_commutative", swapped is not None, a, b)
        note("oplus_neutral", direct_sum(a, EMPTY) == a and direct_sum(EMPTY, a) == a, a)

        note("boxplus_associative", kronecker_sum(kronecker_sum(a, b), c) == kronecker_sum(a, kronecker_sum(b, c)), a, b, c)
        comm = permutation_similar(kronecker_sum(a, b), kronecker_sum(b, a), cap=cap, hint=kron_commutation_witness(p, q))
        note("boxplus_commutative", comm is not None, a, b)
        one = ((Fraction(0),),)
        note("boxplus_neutral", kronecker_sum(a, one) == a and kronecker_sum(one, a) == a, a)
        note("boxplus_annihilates_zero", kronecker_sum(a, EMPTY) == EMPTY and kronecker_sum(EMPTY, a) == EMPTY, a)

        dist = permutation_similar(
            kronecker_sum(a, direct_sum(b, c)),
            direct_sum(kronecker_sum(a, b), kronecker_sum(a, c)),
            cap=cap,
            hint=distribution_interleave_witness(p, q, r),
        )
        note("distributive_left", dist is not None, a, b, c)
        note(
            "distributive_right",
            kronecker_sum(direct_sum(b, c), a)
            == direct_sum(kronecker_sum(b, a), kronecker_sum(c, a)),
            a,
            b,
            c,
        )

        note("intmat_closure", is_intmat(direct_sum(a, b)) and is_intmat(kronecker_sum(a, b)), a, b)

        wp = random_permutation(rng, p)
        wq = random_permutation(rng, q)
        ap = conjugate_by_permutation(a, wp)
        bq = conjugate_by_permutation(b, wq)
        ok = direct_sum(ap, bq) == conjugate_by_permutation(direct_sum(a, b), direct_sum_perm(wp, wq))
        ok = ok and kronecker_sum(ap, bq) == conjugate_by_permutation(kronecker_sum(a, b), kron_perm(wp, wq))
        ok = ok and permutation_similar(direct_sum(a, b), direct_sum(ap, bq), cap=cap) is not None
        note("conjugation_well_defined", ok, a, b)

    return LawReport(results)


def matrix_power_identity(a: RatMatrix, b: RatMatrix, n: int) -> bool:
    """Exact binomial expansion of Kronecker-sum powers:
    (A # B)^n == sum_k binom(n, k) A^(n-k) (x) B^k."""
    if n < 0:
        raise ValueError("n must be >= 0")
    lhs = mat_pow(kronecker_sum(a, b), n)
    size = len(a) * len(b)
    rhs = mat_scale(0, identity_matrix(size))
    for k in range(n + 1):
        term = kronecker_product(mat_pow(a, n - k), mat_pow(b, k))
        rhs = mat_add(rhs, mat_scale(math.comb(n, k), term))
    return lhs == rhs
