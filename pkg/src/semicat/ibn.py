"""Brute-force classification of semirings by invariant basis number.

A semiring fails IBN when two free semimodules of different ranks are
isomorphic; the witness is a pair of matrices composing to identities both
ways.  Finite carriers with more than one element always classify as IBN by
a counting argument (|R|^n is injective in n), so the exhaustive search is
kept both as an independent oracle and for the one-element carrier, where
non-trivial types actually occur.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import SearchCapExceeded, UnsupportedCarrier
from .matcat import Morphism, from_entries, identity, zero_morphism
from .semirings import opposite_semiring

DEFAULT_PAIR_CAP = 50_000_000


@dataclass
class TypeClassification:
    """Either IBN up to the scanned cap, or the first witnessed rank collapse."""

    kind: str  # "ibn" | "type"
    cap: int
    n: int = 0
    h: int = 0
    witness: tuple = None  # (A, B) with A;B = 1 and B;A = 1
    refuted: tuple = ()  # (n, h) pairs checked (and failed) before success
    regime: str = "exhaustive"  # "exhaustive" | "cardinality" | "declared"

    @property
    def has_ibn(self):
        return self.kind == "ibn"

    def to_json(self):
        data = {"kind": self.kind, "cap": self.cap, "regime": self.regime}
        if self.kind == "type":
            data.update({"n": self.n, "h": self.h})
        return data


def free_iso_witness(semiring, n, m, search_cap=DEFAULT_PAIR_CAP, shortcut=True):
    """Search for (A: n x m, B: m x n) with A;B and B;A both identities.

    With ``shortcut`` enabled, finite carriers of size > 1 refute n != m by
    cardinality without searching.  The search itself runs a column-major
    odometer over A, then B, aborting on the first failed identity entry.
    """
    if n < 1 or m < 1:
        raise UnsupportedCarrier("witness search needs positive ranks")
    R = semiring
    if n == m:
        return identity(R, n), identity(R, m)
    if not R.is_finite:
        if shortcut and R.declared_ibn:
            return None
        raise UnsupportedCarrier(
            f"no exhaustive search over the infinite carrier {R.name}")
    if shortcut and R.size > 1:
        # |R|^n elements in the rank-n free semimodule; unequal sizes cannot
        # be isomorphic.
        return None
    total = R.size ** (2 * n * m)
    if total > search_cap:
        raise SearchCapExceeded(f"{total} witness pairs exceed the cap {search_cap}")
    for a in _column_major_matrices(R, n, m):
        for b in _column_major_matrices(R, m, n):
            if _is_identity_product(R, a, b, n) and _is_identity_product(R, b, a, m):
                return (
                    from_entries(R, a, dom=n, cod=m),
                    from_entries(R, b, dom=m, cod=n),
                )
    return None


def _column_major_matrices(R, rows, cols):
    elements = list(R.elements())
    for flat in itertools.product(elements, repeat=rows * cols):
        # flat[j * rows + i] fills column j from top to bottom
        yield tuple(
            tuple(flat[j * rows + i] for j in range(cols)) for i in range(rows))


def _is_identity_product(R, a, b, size):
    inner = len(b)
    for i in range(size):
        for t in range(size):
            val = R.sum(R.mul(a[i][j], b[j][t]) for j in range(inner))
            target = R.one if i == t else R.zero
            if not R.eq(val, target):
                return False
    return True


def classify_type(semiring, cap, search_cap=DEFAULT_PAIR_CAP, shortcut=True):
    """Scan (n, n+h) pairs in lexicographic (n, h) order up to the rank cap."""
    if cap < 2:
        raise UnsupportedCarrier("classification needs cap >= 2")
    R = semiring
    if not R.is_finite:
        if R.declared_ibn:
            return TypeClassification(kind="ibn", cap=cap, regime="declared")
        raise UnsupportedCarrier(
            f"{R.name} has neither tables nor a declared classification")
    refuted = []
    regime = "exhaustive" if (not shortcut or R.size == 1) else "cardinality"
    for n in range(1, cap):
        for h in range(1, cap - n + 1):
            witness = free_iso_witness(R, n, n + h, search_cap, shortcut)
            if witness is not None:
                a, b = witness
                if not (a.then(b).is_identity() and b.then(a).is_identity()):
                    raise AssertionError("witness failed its own re-check")
                return TypeClassification(
                    kind="type", cap=cap, n=n, h=h, witness=witness,
                    refuted=tuple(refuted), regime=regime)
            refuted.append((n, h))
    return TypeClassification(
        kind="ibn", cap=cap, refuted=tuple(refuted), regime=regime)


@dataclass
class LeftRightReport:
    left: TypeClassification
    right: TypeClassification

    @property
    def agree(self):
        if self.left.kind != self.right.kind:
            return False
        if self.left.kind == "type":
            return (self.left.n, self.left.h) == (self.right.n, self.right.h)
        return self.left.cap == self.right.cap

    def to_json(self):
        return {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "agree": self.agree,
        }


def left_right_ibn_agree(semiring, cap, search_cap=DEFAULT_PAIR_CAP, shortcut=True):
    """Classify over R and over its opposite; the classifications must agree."""
    left = classify_type(semiring, cap, search_cap, shortcut)
    right = classify_type(opposite_semiring(semiring), cap, search_cap, shortcut)
    return LeftRightReport(left=left, right=right)


def extend_witness(witness, steps_up=0, pad=0):
    """Transport an F_n ~ F_{n+h} witness to larger / congruent ranks.

    ``pad`` block-extends both matrices by an identity of that rank (giving
    F_{n+pad} ~ F_{n+h+pad}); ``steps_up`` then chains the padded witness,
    moving up by h each time.  The result is re-verified.
    """
    a, b = witness
    R = a.semiring
    if pad:
        a = _block_diag(a, identity(R, pad))
        b = _block_diag(b, identity(R, pad))
    base_a, base_b = a, b
    h = base_a.cod.rank - base_a.dom.rank
    for step in range(1, steps_up + 1):
        a = a.then(_block_diag(base_a, identity(R, step * h)))
        b = _block_diag(base_b, identity(R, step * h)).then(b)
    if not (a.then(b).is_identity() and b.then(a).is_identity()):
        raise AssertionError("transported witness failed verification")
    return a, b


def _block_diag(m, other):
    R = m.semiring
    n1, m1 = m.dom.rank, m.cod.rank
    n2, m2 = other.dom.rank, other.cod.rank
    out = zero_morphism(R, n1 + n2, m1 + m2)
    entries = [list(row) for row in out.entries]
    for i in range(n1):
        for j in range(m1):
            entries[i][j] = m.entries[i][j]
    for i in range(n2):
        for j in range(m2):
            entries[n1 + i][m1 + j] = other.entries[i][j]
    return Morphism(R, n1 + n2, m1 + m2, entries)
