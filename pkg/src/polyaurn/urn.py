"""Generalized Polya urns with finitely supported exact replacement measures.

An urn consists of q colours, one replacement measure per colour, a
nonnegative rational activity per colour, and an initial configuration of
ball counts. Colours are the indices 0..q-1; optional display labels are
metadata and ignored by all algebra. Increment vectors are dense integer
tuples of length q; the entry for the drawn colour may be -1 (the drawn
ball is removed again) but every other entry must be nonnegative, so no
ball other than the drawn one ever leaves the urn.

All probabilities and activities are exact fractions.Fraction values, which
keeps expectations, compositions, and isomorphism checks decidable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    InputError,
    NegativeActivity,
    NegativeInitial,
    ProbabilityMass,
    SupportViolation,
    ZeroActivityRule,
)
from .rational import as_fraction, format_rational, parse_rational

Colour = int
Increment = tuple[int, ...]

ONE = Fraction(1)


@dataclass(frozen=True)
class ReplacementMeasure:
    """Finite-support probability distribution over integer increments.

    Atoms are (increment, probability) pairs with pairwise distinct
    increments and probabilities in (0, 1] summing exactly to 1. The atom
    list is normalized to lexicographic order on increments so that two
    equal measures compare equal as values.
    """

    atoms: tuple[tuple[Increment, Fraction], ...]

    def __post_init__(self):
        atoms = tuple(sorted(((tuple(x), as_fraction(p)) for x, p in self.atoms)))
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ProbabilityMass("a replacement measure needs at least one atom")
        width = len(atoms[0][0])
        total = Fraction(0)
        for k, (x, p) in enumerate(atoms):
            if len(x) != width:
                raise InputError(f"atom {k}: increment length {len(x)} != {width}")
            if not 0 < p <= 1:
                raise ProbabilityMass(f"atom {k}: probability {p} outside (0, 1]")
            total += p
        if total != 1:
            raise ProbabilityMass(f"atom probabilities sum to {total}, not 1")
        for k in range(1, len(atoms)):
            if atoms[k][0] == atoms[k - 1][0]:
                raise InputError(f"duplicate atom increment {atoms[k][0]}")

    @property
    def width(self) -> int:
        return len(self.atoms[0][0])

    def is_dirac_at_zero(self) -> bool:
        return len(self.atoms) == 1 and all(v == 0 for v in self.atoms[0][0])

    def mean(self) -> tuple[Fraction, ...]:
        """Componentwise expectation of the increment."""
        out = [Fraction(0)] * self.width
        for x, p in self.atoms:
            for j, v in enumerate(x):
                if v:
                    out[j] += p * v
        return tuple(out)

    def second_moment(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact E[x x^T] over the atoms."""
        q = self.width
        out = [[Fraction(0)] * q for _ in range(q)]
        for x, p in self.atoms:
            for i, xi in enumerate(x):
                if xi:
                    for j, xj in enumerate(x):
                        if xj:
                            out[i][j] += p * xi * xj
        return tuple(tuple(row) for row in out)


def dirac(increment: Sequence[int]) -> ReplacementMeasure:
    """The deterministic measure concentrated at one increment."""
    return ReplacementMeasure(((tuple(increment), ONE),))


@dataclass(frozen=True)
class MixtureEvent:
    """One sampler event of a product colour's mixture decomposition.

    side is 0 when the event realizes a replacement of the left factor,
    1 for the right factor, and -1 for the degenerate Dirac measure of a
    zero-activity pair. atom indexes into the merged measure's atom list;
    two events may share an atom when both factors produce the same
    increment, which is exactly why the fired side must be recorded at
    sampling time rather than recovered from the increment.
    """

    side: int
    atom: int
    weight: Fraction


@dataclass(frozen=True)
class ProductMeta:
    """Provenance of an urn built as product(left, right)."""

    left: "PolyaUrn"
    right: "PolyaUrn"
    events: tuple[tuple[MixtureEvent, ...], ...]


@dataclass(frozen=True)
class PolyaUrn:
    """A validated generalized Polya urn.

    Instances are immutable values; labels and product provenance are
    metadata excluded from equality and hashing.
    """

    colour_count: int
    measures: tuple[ReplacementMeasure, ...]
    activities: tuple[Fraction, ...]
    initial: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)
    product_meta: Optional[ProductMeta] = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        q = self.colour_count
        object.__setattr__(self, "measures", tuple(self.measures))
        object.__setattr__(
            self, "activities", tuple(as_fraction(a) for a in self.activities)
        )
        object.__setattr__(self, "initial", tuple(int(n) for n in self.initial))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if len(self.measures) != q or len(self.activities) != q or len(self.initial) != q:
            raise InputError(
                f"inconsistent lengths: {q} colours, {len(self.measures)} measures, "
                f"{len(self.activities)} activities, {len(self.initial)} initial counts"
            )
        if self.labels is not None and len(self.labels) != q:
            raise InputError(f"{len(self.labels)} labels for {q} colours")
        for i in range(q):
            a = self.activities[i]
            if a < 0:
                raise NegativeActivity(f"colour {self.colour_name(i)}: activity {a} < 0")
            if self.initial[i] < 0:
                raise NegativeInitial(
                    f"colour {self.colour_name(i)}: initial count {self.initial[i]} < 0"
                )
            m = self.measures[i]
            if m.width != q:
                raise InputError(
                    f"colour {self.colour_name(i)}: measure width {m.width} != {q}"
                )
            for k, (x, _) in enumerate(m.atoms):
                for j, v in enumerate(x):
                    if v < -(1 if i == j else 0):
                        raise SupportViolation(
                            f"colour {self.colour_name(i)}, atom {k}: increment "
                            f"{v} at colour {self.colour_name(j)} removes a ball "
                            "other than the drawn one"
                        )
            if a == 0 and not m.is_dirac_at_zero():
                raise ZeroActivityRule(
                    f"colour {self.colour_name(i)} has activity 0 but its measure "
                    "is not the Dirac measure at 0"
                )

    def colour_name(self, i: Colour) -> str:
        if self.labels is not None and i < len(self.labels):
            return self.labels[i]
        return f"c{i}"

    def total_activity_weight(self, counts: Sequence[int]) -> Fraction:
        return sum(
            (a * n for a, n in zip(self.activities, counts)), start=Fraction(0)
        )


def make_urn(colour_count, measures, activities, initial, labels=None) -> PolyaUrn:
    """Validating constructor accepting loosely typed inputs.

    measures may contain ReplacementMeasure instances or iterables of
    (increment, probability) pairs; activities accept ints, Fractions, or
    "p/q" strings.
    """
    ms = tuple(
        m if isinstance(m, ReplacementMeasure) else ReplacementMeasure(tuple(m))
        for m in measures
    )
    return PolyaUrn(int(colour_count), ms, tuple(activities), tuple(initial), labels)


def zero_urn() -> PolyaUrn:
    """The urn with no colours: the additive neutral element."""
    return PolyaUrn(0, (), (), ())


def unit_urn() -> PolyaUrn:
    """One inactive colour holding one ball: the multiplicative neutral element."""
    return scalar_urn(Fraction(0))


def scalar_urn(alpha) -> PolyaUrn:
    """One colour with activity alpha whose draws return the ball unchanged."""
    a = as_fraction(alpha)
    if a < 0:
        raise NegativeActivity(f"activity {a} < 0")
    return PolyaUrn(1, (dirac((0,)),), (a,), (1,))


def expected_replacement(urn: PolyaUrn, i: Colour) -> tuple[Fraction, ...]:
    """Exact mean increment when a ball of colour i is drawn."""
    return urn.measures[i].mean()


def second_moment_matrix(urn: PolyaUrn, i: Colour) -> tuple[tuple[Fraction, ...], ...]:
    """Exact second moment matrix E[x x^T] of colour i's replacement."""
    return urn.measures[i].second_moment()


# -- urn file format ---------------------------------------------------------
#
# {"colours": ["A", "B"], "activities": ["1", "1/2"], "initial": [1, 0],
#  "replacements": [[{"prob": "1/2", "delta": {"A": -1, "B": 2}}, ...], ...]}
#
# Rationals are "p/q" or integer strings; delta omits zero entries. A urn
# written by the product composition additionally carries a "product" field
# embedding both factor urn documents, which lets downstream tools recover
# the factorization (e.g. for limit predictions).


def _unique_names(urn: PolyaUrn) -> list[str]:
    names = [urn.colour_name(i) for i in range(urn.colour_count)]
    if len(set(names)) != len(names):
        names = [f"c{i}" for i in range(urn.colour_count)]
    return names


def urn_to_json(urn: PolyaUrn, include_product: bool = True) -> dict:
    names = _unique_names(urn)
    doc = {
        "colours": names,
        "activities": [format_rational(a) for a in urn.activities],
        "initial": list(urn.initial),
        "replacements": [
            [
                {
                    "prob": format_rational(p),
                    "delta": {names[j]: v for j, v in enumerate(x) if v},
                }
                for x, p in m.atoms
            ]
            for m in urn.measures
        ],
    }
    if include_product and urn.product_meta is not None:
        doc["product"] = {
            "left": urn_to_json(urn.product_meta.left),
            "right": urn_to_json(urn.product_meta.right),
        }
    return doc


def urn_from_json(doc: dict) -> PolyaUrn:
    try:
        names = [str(s) for s in doc["colours"]]
        activities = [parse_rational(str(a)) for a in doc["activities"]]
        initial = [int(n) for n in doc["initial"]]
        replacements = doc["replacements"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed urn document: {exc}") from exc
    if len(set(names)) != len(names):
        raise InputError("duplicate colour names")
    index = {name: j for j, name in enumerate(names)}
    q = len(names)
    measures = []
    for i, atoms_doc in enumerate(replacements):
        atoms = []
        for k, atom in enumerate(atoms_doc):
            try:
                p = parse_rational(str(atom["prob"]))
                delta = atom.get("delta", {})
            except (KeyError, TypeError) as exc:
                raise InputError(
                    f"colour {names[i]}, atom {k}: malformed atom: {exc}"
                ) from exc
            x = [0] * q
            for name, v in delta.items():
                if name not in index:
                    raise InputError(
                        f"colour {names[i]}, atom {k}: unknown colour {name!r} in delta"
                    )
                x[index[name]] = int(v)
            atoms.append((tuple(x), p))
        try:
            measures.append(ReplacementMeasure(tuple(atoms)))
        except InputError:
            raise
        except Exception as exc:
            raise type(exc)(f"colour {names[i]}: {exc}") from exc
    urn = make_urn(q, measures, activities, initial, labels=names)
    if "product" in doc:
        # Rebuilding the product from its factors both validates the file and
        # restores the sampler metadata (mixture sides).
        from .algebra import product

        left = urn_from_json(doc["product"]["left"])
        right = urn_from_json(doc["product"]["right"])
        rebuilt = product(left, right)
        if rebuilt != urn:
            raise InputError("urn document does not match its embedded product factors")
        return PolyaUrn(
            urn.colour_count,
            urn.measures,
            urn.activities,
            urn.initial,
            labels=urn.labels,
            product_meta=rebuilt.product_meta,
        )
    return urn


def save_urn(urn: PolyaUrn, path, pretty: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(urn_to_json(urn), fh, indent=2 if pretty else None, sort_keys=True)
        fh.write("\n")


def load_urn(path) -> PolyaUrn:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    return urn_from_json(doc)


def urn_hash(urn: PolyaUrn) -> str:
    """Stable hash of the algebraic content (labels excluded)."""
    doc = urn_to_json(
        PolyaUrn(urn.colour_count, urn.measures, urn.activities, urn.initial),
        include_product=False,
    )
    blob = json.dumps(doc, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
