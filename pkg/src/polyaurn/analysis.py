"""Dominance structure, eigenvalue assumptions, and the product limit vector.

Colour i dominates colour j when drawing i eventually produces j, i.e. some
power of the intensity matrix has a positive (j, i) entry; for matrices with
nonnegative off-diagonals this coincides with reachability in the digraph of
positive off-diagonal entries (plus reflexivity). The strongly connected
classes of that relation, their partial order, and the unique maximal
("dominating") class when it exists drive the assumptions below.

The assumption list follows the standard numbering for multitype branching
asymptotics: (A1) only the drawn ball may be removed, (A2) square-integrable
replacements, (A3) the largest real eigenvalue is positive, (A4) it is
simple, (A5) a dominating colour starts with a positive count, and (A6) the
largest real eigenvalue belongs to the dominating class. When two urns both
satisfy them, the normalized composition of the product urn converges almost
surely to S^{-1} (lambda1 + lambda1') (v1 (x) v1'), with v1, v1' scaled so
that <a, v1> = <a', v1'> = 1 and S = <1, v1> + <1, v1'>.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import LawReport, LawResult, product
from .errors import AssumptionsFail, DegenerateNormalization, NonRealTop
from .intensity import (
    RatMatrix,
    intensity_matrix,
    kronecker_product,
    mat_add,
    mat_scale,
    mat_to_float,
)
from .urn import PolyaUrn, second_moment_matrix, urn_to_json

DEFAULT_TOL = 1e-6


# -- dominance ---------------------------------------------------------------


@dataclass(frozen=True)
class DominancePartition:
    """Equivalence classes of mutual dominance with their partial order.

    order contains (s, t) whenever class s dominates class t (including
    s = t); dominating_class is the index of the unique maximal class, or
    None when several classes are maximal.
    """

    classes: tuple[tuple[int, ...], ...]
    order: frozenset[tuple[int, int]]
    dominating_class: Optional[int]

    def class_of(self, colour: int) -> int:
        for s, members in enumerate(self.classes):
            if colour in members:
                return s
        raise IndexError(f"colour {colour} not in any class")

    def dominates(self, s: int, t: int) -> bool:
        return (s, t) in self.order

    def is_irreducible(self) -> bool:
        return len(self.classes) == 1

    def canonical(self):
        sets = tuple(frozenset(c) for c in self.classes)
        rel = frozenset((sets[s], sets[t]) for s, t in self.order)
        dom = sets[self.dominating_class] if self.dominating_class is not None else None
        return (frozenset(sets), rel, dom)

    def to_json(self) -> dict:
        return {
            "classes": [list(c) for c in self.classes],
            "order": sorted([s, t] for s, t in self.order),
            "dominating_class": self.dominating_class,
        }


def _strongly_connected_components(n: int, succ: list[list[int]]) -> list[list[int]]:
    # Tarjan, iterative to keep deep chains safe.
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
    return sccs


def dominance_partition(urn: PolyaUrn) -> DominancePartition:
    """Dominance classes of an urn, their order, and the dominating class."""
    a = intensity_matrix(urn)
    q = urn.colour_count
    succ = [
        [j for j in range(q) if j != i and a[j][i] > 0] for i in range(q)
    ]
    comps = _strongly_connected_components(q, succ)
    comps.sort(key=lambda c: c[0])
    cls_of = {}
    for s, comp in enumerate(comps):
        for v in comp:
            cls_of[v] = s
    nu = len(comps)
    dag = [set() for _ in range(nu)]
    for i in range(q):
        for j in succ[i]:
            if cls_of[i] != cls_of[j]:
                dag[cls_of[i]].add(cls_of[j])
    # transitive reachability on the condensation
    reach = [set([s]) for s in range(nu)]
    for s in range(nu):
        frontier = list(dag[s])
        seen = set(frontier)
        while frontier:
            t = frontier.pop()
            reach[s].add(t)
            for t2 in dag[t]:
                if t2 not in seen:
                    seen.add(t2)
                    frontier.append(t2)
    order = frozenset((s, t) for s in range(nu) for t in reach[s])
    has_incoming = {t for s in range(nu) for t in reach[s] if t != s}
    sources = [s for s in range(nu) if s not in has_incoming]
    dominating = sources[0] if len(sources) == 1 else None
    if q == 0:
        dominating = None
    return DominancePartition(tuple(tuple(c) for c in comps), order, dominating)


def product_partition_check(u: PolyaUrn, u2: PolyaUrn) -> bool:
    """Compare the product urn's dominance partition with the product of the
    factor partitions: classes C_s x C'_t, componentwise order, and a
    dominating class exactly when both factors have one."""
    pu = product(u, u2)
    direct = dominance_partition(pu).canonical()
    pa, pb = dominance_partition(u), dominance_partition(u2)
    q2 = u2.colour_count
    sets = {}
    for s, cs in enumerate(pa.classes):
        for t, ct in enumerate(pb.classes):
            sets[(s, t)] = frozenset(i * q2 + j for i in cs for j in ct)
    rel = frozenset(
        (sets[(s, t)], sets[(s2, t2)])
        for (s, t) in sets
        for (s2, t2) in sets
        if pa.dominates(s, s2) and pb.dominates(t, t2)
    )
    dom = None
    if pa.dominating_class is not None and pb.dominating_class is not None:
        dom = sets[(pa.dominating_class, pb.dominating_class)]
    expected = (frozenset(sets.values()), rel, dom)
    return direct == expected


# -- eigenstructure ----------------------------------------------------------


def largest_real_eigenvalue(a, tol: float = DEFAULT_TOL):
    """(lambda1, algebraic multiplicity, right eigenvector) for the
    eigenvalue of maximal real part.

    Perron-Frobenius theory makes the top eigenvalue of an intensity matrix
    real; a top eigenvalue with |imag| > tol therefore raises NonRealTop.
    The eigenvector is scaled to unit norm with its largest component
    positive. Multiplicity is the number of eigenvalues within tol of the
    top one.
    """
    arr = a if isinstance(a, np.ndarray) else mat_to_float(a)
    if arr.shape[0] == 0:
        raise ValueError("empty matrix has no eigenvalues")
    values, vectors = np.linalg.eig(arr)
    idx = int(np.argmax(values.real))
    lam = values[idx]
    if abs(lam.imag) > tol:
        raise NonRealTop(f"top eigenvalue {lam} has non-negligible imaginary part")
    mult = int(np.sum(np.abs(values - lam) <= tol))
    v = vectors[:, idx]
    pivot = int(np.argmax(np.abs(v)))
    v = v / v[pivot]
    v = v.real
    v = v / np.linalg.norm(v)
    if v[pivot] < 0:
        v = -v
    return float(lam.real), mult, v


@dataclass(frozen=True)
class AssumptionCheck:
    holds: bool
    detail: str

    def to_json(self) -> dict:
        return {"holds": self.holds, "detail": self.detail}


@dataclass(frozen=True)
class AssumptionReport:
    a1: AssumptionCheck
    a2: AssumptionCheck
    a3: AssumptionCheck
    a4: AssumptionCheck
    a5: AssumptionCheck
    a6: AssumptionCheck
    lambda1: Optional[float]
    lambda2_real: Optional[float]
    multiplicity_lambda1: int

    def checks(self) -> dict[str, AssumptionCheck]:
        return {f"A{k}": getattr(self, f"a{k}") for k in range(1, 7)}

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks().values())

    def first_failing(self) -> Optional[str]:
        for name, check in self.checks().items():
            if not check.holds:
                return name
        return None

    def to_json(self) -> dict:
        doc = {name: check.to_json() for name, check in self.checks().items()}
        doc["lambda1"] = self.lambda1
        doc["lambda2_real"] = self.lambda2_real
        doc["multiplicity_lambda1"] = self.multiplicity_lambda1
        return doc


def check_assumptions(urn: PolyaUrn, tol: float = DEFAULT_TOL) -> AssumptionReport:
    """Evaluate (A1)-(A6) for an urn.

    (A1) and (A2) hold by construction (support constraint, finite support)
    and are reported with the witnessing detail; (A3)-(A6) are decided from
    the numerical eigenstructure and the dominance partition.
    """
    a1 = AssumptionCheck(True, "structural: only the drawn ball is ever removed")
    moments = [second_moment_matrix(urn, i) for i in range(urn.colour_count)]
    peak = max((abs(v) for m in moments for row in m for v in row), default=Fraction(0))
    a2 = AssumptionCheck(True, f"finite support; max second moment entry {peak}")
    q = urn.colour_count
    if q == 0:
        absent = AssumptionCheck(False, "no colours")
        return AssumptionReport(a1, a2, absent, absent, absent, absent, None, None, 0)
    a = intensity_matrix(urn)
    lam1, mult, _ = largest_real_eigenvalue(a, tol)
    reals = sorted(np.linalg.eigvals(mat_to_float(a)).real, reverse=True)
    lam2 = float(reals[1]) if q >= 2 else None
    part = dominance_partition(urn)
    a3 = AssumptionCheck(lam1 > tol, f"lambda1 = {lam1:.6g}")
    a4 = AssumptionCheck(mult == 1, f"algebraic multiplicity {mult}")
    if part.dominating_class is None:
        a5 = AssumptionCheck(False, "no dominating class")
        a6 = AssumptionCheck(False, "no dominating class")
    else:
        members = part.classes[part.dominating_class]
        started = [i for i in members if urn.initial[i] > 0]
        a5 = AssumptionCheck(
            bool(started),
            f"dominating class {list(members)}; positive initial counts at {started}",
        )
        sub = mat_to_float(a)[np.ix_(members, members)]
        top_restricted = float(np.max(np.linalg.eigvals(sub).real))
        a6 = AssumptionCheck(
            abs(top_restricted - lam1) <= tol,
            f"restricted top eigenvalue {top_restricted:.6g} vs lambda1 {lam1:.6g}",
        )
    return AssumptionReport(a1, a2, a3, a4, a5, a6, lam1, lam2, mult)


# -- the limit vector --------------------------------------------------------


@dataclass(frozen=True)
class LimitPrediction:
    lambda1_sum: float
    v: tuple[float, ...]
    S: float
    limit: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "lambda1_sum": self.lambda1_sum,
            "v": list(self.v),
            "S": self.S,
            "limit": list(self.limit),
        }


def _normalized_pf_vector(urn: PolyaUrn, tol: float) -> tuple[float, np.ndarray]:
    lam1, _, v = largest_real_eigenvalue(intensity_matrix(urn), tol)
    act = np.array([float(x) for x in urn.activities])
    scale = float(act @ v)
    if abs(scale) <= tol * max(1.0, float(np.abs(v).max())):
        raise DegenerateNormalization(f"<a, v1> = {scale:.3g} is too close to zero")
    return lam1, v / scale


def limit_prediction(u: PolyaUrn, u2: PolyaUrn, tol: float = DEFAULT_TOL) -> LimitPrediction:
    """Almost-sure limit of the normalized composition of product(u, u2).

    Both factors must satisfy (A1)-(A6); the eigenvectors are normalized
    against the activities and combined in lexicographic product order.
    """
    for which, urn in (("left", u), ("right", u2)):
        report = check_assumptions(urn, tol)
        if not report.all_hold:
            name = report.first_failing()
            raise AssumptionsFail(name, which, report.checks()[name].detail)
    lam1, v1 = _normalized_pf_vector(u, tol)
    lam2, v2 = _normalized_pf_vector(u2, tol)
    vec = np.kron(v1, v2)
    s = float(v1.sum() + v2.sum())
    limit = (lam1 + lam2) / s * vec
    limit[np.abs(limit) <= tol * tol] = 0.0
    return LimitPrediction(lam1 + lam2, tuple(vec.tolist()), s, tuple(limit.tolist()))


# -- second-moment identities ------------------------------------------------


def basis_matrix(size: int, i: int, j: int) -> RatMatrix:
    """Square matrix with a single 1 at (i, j)."""
    return tuple(
        tuple(Fraction(1 if (r, c) == (i, j) else 0) for c in range(size))
        for r in range(size)
    )


def aggregate_B(urn: PolyaUrn, v1) -> np.ndarray:
    """B = sum_i v1_i a_i E[xi_i xi_i^T], evaluated in doubles."""
    q = urn.colour_count
    out = np.zeros((q, q))
    for i in range(q):
        weight = float(v1[i]) * float(urn.activities[i])
        if weight:
            out += weight * mat_to_float(second_moment_matrix(urn, i))
    return out


def product_B_identities(u: PolyaUrn, u2: PolyaUrn, tol: float = 1e-9) -> dict:
    """Check both second-moment identities of product urns.

    Per colour (exact rationals): the product second moment at (i, j) is the
    activity-weighted combination of B_i against the (j, j) unit block and
    B'_j against the (i, i) unit block. Aggregate (doubles): with v1, v1'
    normalized against the activities and S = <1,v1> + <1,v1'>, the weighted
    sum of product second moments equals
    (B (x) diag(v1') + diag(v1) (x) B') / S.
    """
    pu = product(u, u2)
    q, q2 = u.colour_count, u2.colour_count
    per_colour = True
    for i in range(q):
        for j in range(q2):
            lhs = second_moment_matrix(pu, i * q2 + j)
            denom = u.activities[i] + u2.activities[j]
            if denom == 0:
                rhs = mat_scale(0, lhs)
            else:
                bi = second_moment_matrix(u, i)
                bj = second_moment_matrix(u2, j)
                rhs = mat_add(
                    mat_scale(
                        u.activities[i] / denom,
                        kronecker_product(bi, basis_matrix(q2, j, j)),
                    ),
                    mat_scale(
                        u2.activities[j] / denom,
                        kronecker_product(basis_matrix(q, i, i), bj),
                    ),
                )
            if lhs != rhs:
                per_colour = False
    # the aggregate identity weights by the leading eigenvectors, so it only
    # makes sense when both factors satisfy the assumptions
    for which, urn in (("left", u), ("right", u2)):
        report = check_assumptions(urn)
        if not report.all_hold:
            name = report.first_failing()
            raise AssumptionsFail(name, which, report.checks()[name].detail)
    _, v1 = _normalized_pf_vector(u, DEFAULT_TOL)
    _, v2 = _normalized_pf_vector(u2, DEFAULT_TOL)
    s = float(v1.sum() + v2.sum())
    v_cross = np.kron(v1, v2) / s
    lhs_agg = aggregate_B(pu, v_cross)
    rhs_agg = (
        np.kron(aggregate_B(u, v1), np.diag(v2))
        + np.kron(np.diag(v1), aggregate_B(u2, v2))
    ) / s
    max_err = float(np.max(np.abs(lhs_agg - rhs_agg))) if lhs_agg.size else 0.0
    return {
        "per_colour_exact": per_colour,
        "aggregate_close": max_err <= tol,
        "max_abs_error": max_err,
        "pass": per_colour and max_err <= tol,
    }


# -- assumption preservation under products ----------------------------------


def _sample_satisfying(rng: random.Random, predicate, tol: float, max_tries: int = 800):
    from .sampling import UrnSamplerConfig, random_lively_urn, random_urn

    lively_cfg = UrnSamplerConfig(max_colours=3, max_increment=2)
    for attempt in range(max_tries):
        urn = (
            random_lively_urn(rng, lively_cfg)
            if attempt % 3
            else random_urn(rng, lively_cfg)
        )
        if urn.colour_count and predicate(check_assumptions(urn, tol)):
            return urn
    raise RuntimeError("sampler failed to find an urn satisfying the predicate")


def check_assumption_preservation(
    trials: int, seed: int = 0, tol: float = DEFAULT_TOL
) -> LawReport:
    """For each assumption, sample factor pairs that both satisfy it and
    check the product does too; also check the dominance partition of the
    product against the product of the factor partitions."""
    rng = random.Random(seed)
    predicates = {
        "A1": lambda rep: rep.a1.holds,
        "A2": lambda rep: rep.a2.holds,
        "A3": lambda rep: rep.a3.holds,
        "A4": lambda rep: rep.a4.holds,
        "A5": lambda rep: rep.a5.holds,
        "A6": lambda rep: rep.a6.holds,
    }
    results = {}
    for name, pred in predicates.items():
        result = LawResult(True, trials)
        for _ in range(trials):
            u = _sample_satisfying(rng, pred, tol)
            u2 = _sample_satisfying(rng, pred, tol)
            rep = check_assumptions(product(u, u2), tol)
            if not pred(rep):
                result = LawResult(
                    False,
                    trials,
                    {
                        "assumption": name,
                        "left": urn_to_json(u),
                        "right": urn_to_json(u2),
                    },
                )
                break
        results[f"preserves_{name}"] = result
    partition = LawResult(True, trials)
    from .sampling import UrnSamplerConfig, random_urn

    cfg = UrnSamplerConfig(max_colours=3)
    for _ in range(trials):
        u, u2 = random_urn(rng, cfg), random_urn(rng, cfg)
        if not product_partition_check(u, u2):
            partition = LawResult(
                False, trials, {"left": urn_to_json(u), "right": urn_to_json(u2)}
            )
            break
    results["partition_product"] = partition
    return LawReport(results)
