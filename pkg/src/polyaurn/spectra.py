"""Complex spectra as finite multisets and the spectral morphism.

Finite multisets of complex numbers form a commutative semiring: multiset
union adds multiplicities, Minkowski addition forms all pairwise sums with
multiplicities multiplying. Taking the spectrum of a square matrix sends
direct sums to unions and Kronecker sums to Minkowski sums; eigenvalues are
computed in double precision here, so spectral comparisons carry an explicit
tolerance while the multiset arithmetic itself stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ConvergenceFailure
from .intensity import direct_sum, kronecker_sum, mat_to_float

DEFAULT_TOL = 1e-6


def _sort_key(z: complex):
    return (z.real, z.imag)


@dataclass(frozen=True)
class SpectrumMultiset:
    """Finite multiset of complex numbers in canonical (re, im) order."""

    entries: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        norm = []
        for z, m in self.entries:
            m = int(m)
            if m < 1:
                raise ValueError(f"multiplicity {m} < 1")
            norm.append((complex(z), m))
        norm.sort(key=lambda e: _sort_key(e[0]))
        object.__setattr__(self, "entries", tuple(norm))

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def expand(self) -> list[complex]:
        return [z for z, m in self.entries for _ in range(m)]

    def to_json(self) -> list:
        return [{"re": z.real, "im": z.imag, "mult": m} for z, m in self.entries]

    @classmethod
    def from_values(cls, values, tol: float = 0.0) -> "SpectrumMultiset":
        return cls(_cluster(list(values), tol))


def _cluster(values: list[complex], tol: float) -> tuple[tuple[complex, int], ...]:
    # Single-linkage with radius tol; near-coincident distinct eigenvalues
    # merge, which the callers accept in exchange for stable multiplicities.
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(values[i])
    out = []
    for members in groups.values():
        rep = sum(members) / len(members)
        out.append((rep, len(members)))
    return tuple(out)


def spectrum(a, tol: float = DEFAULT_TOL) -> SpectrumMultiset:
    """All eigenvalues of a square matrix with algebraic multiplicities,
    clustered within tol."""
    arr = a if isinstance(a, np.ndarray) else mat_to_float(a)
    arr = np.asarray(arr, dtype=complex)
    if arr.size == 0:
        return SpectrumMultiset(())
    try:
        values = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return SpectrumMultiset.from_values(values.tolist(), tol)


def multiset_union(m: SpectrumMultiset, m2: SpectrumMultiset) -> SpectrumMultiset:
    acc: dict[complex, int] = {}
    for z, k in list(m.entries) + list(m2.entries):
        acc[z] = acc.get(z, 0) + k
    return SpectrumMultiset(tuple(acc.items()))


def minkowski_sum(m: SpectrumMultiset, m2: SpectrumMultiset) -> SpectrumMultiset:
    acc: dict[complex, int] = {}
    for z, k in m.entries:
        for w, l in m2.entries:
            s = z + w
            acc[s] = acc.get(s, 0) + k * l
    return SpectrumMultiset(tuple(acc.items()))


def multiset_approx_equal(
    m: SpectrumMultiset, m2: SpectrumMultiset, tol: float = DEFAULT_TOL
) -> bool:
    """True iff the multisets admit a perfect matching within distance tol.

    The greedy pairing on canonical order settles almost every case; ties
    near the tolerance fall back to an exact bipartite matching.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    left = sorted(m.expand(), key=_sort_key)
    right = sorted(m2.expand(), key=_sort_key)
    if len(left) != len(right):
        return False
    if not left:
        return True
    if all(abs(x - y) <= tol for x, y in zip(left, right)):
        return True
    n = len(left)
    adjacency = np.array(
        [[abs(x - y) <= tol for y in right] for x in left], dtype=bool
    )
    if not adjacency.any(axis=1).all() or not adjacency.any(axis=0).all():
        return False
    match = maximum_bipartite_matching(
        scipy.sparse.csr_matrix(adjacency), perm_type="column"
    )
    return bool((match >= 0).all())


def verify_sigma_morphism(a, b, tol: float = DEFAULT_TOL) -> dict:
    """Check that the spectrum respects both matrix compositions: union for
    the direct sum and Minkowski addition for the Kronecker sum."""
    sa, sb = spectrum(a, tol), spectrum(b, tol)
    report = {
        "direct_sum_matches": multiset_approx_equal(
            spectrum(direct_sum(a, b), tol), multiset_union(sa, sb), tol
        ),
        "kronecker_sum_matches": multiset_approx_equal(
            spectrum(kronecker_sum(a, b), tol), minkowski_sum(sa, sb), tol
        ),
    }
    report["pass"] = all(report.values())
    return report
