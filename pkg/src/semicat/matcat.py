"""Matrix category of finitely generated free (left) semimodules.

Conventions used throughout the library:

* composition is diagrammatic: ``f.then(g)`` means "f first, then g", and is
  the matrix product A_f * A_g;
* a morphism n -> m is an n x m grid, and elements of the rank-n free
  semimodule are length-n row vectors acting by ``a |-> a @ A``;
* the rank-0 object is the zero object, with empty matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    MissingIso,
    NonInvertibleFamily,
    SearchCapExceeded,
    SemiringMismatch,
    ZeroRank,
)

DEFAULT_INVERT_CAP = 400_000


@dataclass(frozen=True)
class FreeObject:
    """A free semimodule of finite rank; canonical skeleton objects are 'F<n>'."""

    rank: int
    label: str = ""

    def __post_init__(self):
        if self.rank < 0:
            raise DimensionMismatch(f"negative rank {self.rank}")
        if not self.label:
            object.__setattr__(self, "label", f"F{self.rank}")

    @property
    def is_canonical(self):
        return self.label == f"F{self.rank}"

    def __repr__(self):
        return self.label


def canonical(rank):
    return FreeObject(rank)


def _as_object(obj_or_rank):
    if isinstance(obj_or_rank, FreeObject):
        return obj_or_rank
    return FreeObject(obj_or_rank)


class Morphism:
    """A matrix over a semiring, read as a map between free semimodules."""

    __slots__ = ("semiring", "dom", "cod", "entries")

    def __init__(self, semiring, dom, cod, entries):
        dom = _as_object(dom)
        cod = _as_object(cod)
        entries = tuple(tuple(row) for row in entries)
        if len(entries) != dom.rank:
            raise DimensionMismatch(
                f"{len(entries)} rows for domain rank {dom.rank}")
        for row in entries:
            if len(row) != cod.rank:
                raise DimensionMismatch(
                    f"row of length {len(row)} for codomain rank {cod.rank}")
        self.semiring = semiring
        self.dom = dom
        self.cod = cod
        self.entries = entries

    def then(self, other):
        """Diagrammatic composite self ; other (matrix product)."""
        if self.semiring != other.semiring:
            raise SemiringMismatch(
                f"{self.semiring.name} vs {other.semiring.name}")
        if self.cod != other.dom:
            raise DimensionMismatch(f"cannot compose {self} with {other}")
        R = self.semiring
        entries = _mat_mul(R, self.entries, other.entries, other.cod.rank)
        return Morphism(R, self.dom, other.cod, entries)

    def __add__(self, other):
        if self.semiring != other.semiring:
            raise SemiringMismatch(
                f"{self.semiring.name} vs {other.semiring.name}")
        if self.dom != other.dom or self.cod != other.cod:
            raise DimensionMismatch(f"cannot add {self} and {other}")
        R = self.semiring
        entries = tuple(
            tuple(R.add(a, b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.entries, other.entries))
        return Morphism(R, self.dom, self.cod, entries)

    def map_entries(self, fn):
        """Apply a carrier map entrywise (same semiring, same shape)."""
        return Morphism(
            self.semiring, self.dom, self.cod,
            tuple(tuple(fn(e) for e in row) for row in self.entries))

    def row(self, i):
        """The i-th row slice as a morphism F1 -> cod."""
        return Morphism(self.semiring, FreeObject(1), self.cod, (self.entries[i],))

    def act(self, vector):
        """Row-vector action: a |-> a @ A."""
        if len(vector) != self.dom.rank:
            raise DimensionMismatch("vector length does not match domain rank")
        R = self.semiring
        return tuple(
            R.sum(R.mul(vector[i], self.entries[i][j]) for i in range(self.dom.rank))
            for j in range(self.cod.rank))

    def is_identity(self):
        if self.dom.rank != self.cod.rank:
            return False
        return self.entries == _identity_entries(self.semiring, self.dom.rank)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Morphism)
            and self.entries == other.entries
            and self.dom == other.dom
            and self.cod == other.cod
            and self.semiring == other.semiring
        )

    def __hash__(self):
        return hash((self.dom, self.cod, self.entries))

    def __repr__(self):
        return f"{self.dom}->{self.cod}{list(list(r) for r in self.entries)}"


def _mat_mul(R, a_entries, b_entries, cod_rank):
    mul = R.mul
    add = R.add
    zero = R.zero
    m = len(b_entries)
    out = []
    for row in a_entries:
        new_row = []
        for t in range(cod_rank):
            acc = zero
            for j in range(m):
                acc = add(acc, mul(row[j], b_entries[j][t]))
            new_row.append(acc)
        out.append(tuple(new_row))
    return tuple(out)


def _identity_entries(R, n):
    return tuple(
        tuple(R.one if i == j else R.zero for j in range(n)) for i in range(n))


def identity(semiring, obj_or_rank):
    obj = _as_object(obj_or_rank)
    return Morphism(semiring, obj, obj, _identity_entries(semiring, obj.rank))


def zero_morphism(semiring, dom, cod):
    dom = _as_object(dom)
    cod = _as_object(cod)
    return Morphism(
        semiring, dom, cod,
        tuple(tuple(semiring.zero for _ in range(cod.rank)) for _ in range(dom.rank)))


def from_entries(semiring, entries, dom=None, cod=None):
    entries = [list(row) for row in entries]
    n = len(entries)
    m = len(entries[0]) if entries else 0
    return Morphism(
        semiring,
        _as_object(dom if dom is not None else n),
        _as_object(cod if cod is not None else m),
        entries)


def compose(f, g):
    return f.then(g)


def add_morphisms(f, g):
    return f + g


def morphism_to_json(m):
    return {
        "semiring": m.semiring.name,
        "dom": m.dom.rank,
        "cod": m.cod.rank,
        "entries": [[m.semiring.value_to_json(e) for e in row] for row in m.entries],
    }


def morphism_from_json(semiring, data):
    entries = [
        [semiring.value_from_json(e) for e in row] for row in data["entries"]
    ]
    return Morphism(semiring, data["dom"], data["cod"], entries)


class BiproductSystem:
    """Unit-row injections, unit-column projections, and the fold map of F_n."""

    def __init__(self, semiring, rank):
        if rank < 1:
            raise ZeroRank("the zero object has an empty biproduct system")
        R = semiring
        self.semiring = R
        self.rank = rank
        one, zero = R.one, R.zero
        f1 = FreeObject(1)
        fn = FreeObject(rank)
        self.injections = tuple(
            Morphism(R, f1, fn, ((tuple(one if j == i else zero for j in range(rank)),)))
            for i in range(rank))
        self.projections = tuple(
            Morphism(R, fn, f1, tuple((one,) if j == i else (zero,) for j in range(rank)))
            for i in range(rank))
        self.codiagonal = Morphism(R, fn, f1, tuple((one,) for _ in range(rank)))
        self._verify()

    def _verify(self):
        R = self.semiring
        n = self.rank
        total = zero_morphism(R, n, n)
        for i in range(n):
            total = total + self.projections[i].then(self.injections[i])
            if not self.injections[i].then(self.projections[i]).is_identity():
                raise DimensionMismatch("injection/projection pairing broken")
            if not self.injections[i].then(self.codiagonal).is_identity():
                raise DimensionMismatch("codiagonal pairing broken")
            for j in range(n):
                if i != j and self.injections[i].then(self.projections[j]) != zero_morphism(R, 1, 1):
                    raise DimensionMismatch("cross injection/projection not zero")
        if not total.is_identity():
            raise DimensionMismatch("sum of projection;injection is not the identity")


def biproduct_system(semiring, rank):
    return BiproductSystem(semiring, rank)


# ---------------------------------------------------------------------------
# enumeration and inversion


def count_morphisms(semiring, n, m):
    if not semiring.is_finite:
        return None
    return semiring.size ** (n * m)


def enumerate_morphisms(semiring, n, m, dom=None, cod=None):
    """All morphisms n -> m over a finite carrier, in row-major lexicographic order."""
    elements = list(semiring.elements())
    dom = _as_object(dom if dom is not None else n)
    cod = _as_object(cod if cod is not None else m)
    if n == 0 or m == 0:
        yield zero_morphism(semiring, dom, cod)
        return
    for flat in itertools.product(elements, repeat=n * m):
        entries = tuple(flat[i * m:(i + 1) * m] for i in range(n))
        yield Morphism(semiring, dom, cod, entries)


def random_morphism(semiring, n, m, rng, dom=None, cod=None):
    dom = _as_object(dom if dom is not None else n)
    cod = _as_object(cod if cod is not None else m)
    entries = tuple(
        tuple(semiring.sample_element(rng) for _ in range(m)) for _ in range(n))
    return Morphism(semiring, dom, cod, entries)


def _try_monomial_inverse(m):
    """Inverse of a generalized permutation matrix (unit entries), or None."""
    R = m.semiring
    n = m.dom.rank
    zero = R.zero
    position = [None] * n
    seen_cols = set()
    for i in range(n):
        nonzero = [j for j in range(n) if not R.eq(m.entries[i][j], zero)]
        if len(nonzero) != 1 or nonzero[0] in seen_cols:
            return None
        j = nonzero[0]
        inv = R.try_unit_inverse(m.entries[i][j])
        if inv is None:
            return None
        position[i] = (j, inv)
        seen_cols.add(j)
    entries = [[zero] * n for _ in range(n)]
    for i, (j, inv) in enumerate(position):
        entries[j][i] = inv
    cand = Morphism(R, m.cod, m.dom, entries)
    if m.then(cand).is_identity() and cand.then(m).is_identity():
        return cand
    return None


def invert(m, cap=DEFAULT_INVERT_CAP):
    """Two-sided inverse of a square morphism, or None if provably absent.

    Tries unit/monomial fast paths first, then (finite carriers) an exhaustive
    search over candidate matrices.  Raises SearchCapExceeded when the space
    is larger than the cap and no fast path applied: that outcome is
    "undecided", not "no inverse".
    """
    if m.dom.rank != m.cod.rank:
        raise DimensionMismatch("only square morphisms can be inverted")
    n = m.dom.rank
    R = m.semiring
    if n == 0:
        return Morphism(R, m.cod, m.dom, ())
    if n == 1:
        inv = R.try_unit_inverse(m.entries[0][0])
        if inv is None:
            return None
        return Morphism(R, m.cod, m.dom, ((inv,),))
    fast = _try_monomial_inverse(m)
    if fast is not None:
        return fast
    if not R.is_finite:
        raise SearchCapExceeded(
            f"cannot search for an inverse over the infinite carrier {R.name}")
    total = R.size ** (n * n)
    if total > cap:
        raise SearchCapExceeded(f"{total} inverse candidates exceed the cap {cap}")
    ident = _identity_entries(R, n)
    for cand in enumerate_morphisms(R, n, n, dom=m.cod, cod=m.dom):
        if _product_equals(R, m.entries, cand.entries, ident) and _product_equals(
                R, cand.entries, m.entries, ident):
            return cand
    return None


def _product_equals(R, a, b, target):
    n = len(a)
    m = len(b)
    for i in range(n):
        for t in range(len(target[0])):
            val = R.sum(R.mul(a[i][j], b[j][t]) for j in range(m))
            if not R.eq(val, target[i][t]):
                return False
    return True


_INVERTIBLE_CACHE = {}


def invertible_morphisms(semiring, n, cap=DEFAULT_INVERT_CAP):
    """All (M, M_inverse) pairs of invertible n x n morphisms, lexicographic."""
    if not semiring.is_finite:
        raise SearchCapExceeded("invertible enumeration needs a finite carrier")
    cache_key = (semiring.key(), n)
    if cache_key in _INVERTIBLE_CACHE:
        return _INVERTIBLE_CACHE[cache_key]
    total = semiring.size ** (n * n)
    if total > cap:
        raise SearchCapExceeded(
            f"{total} candidate matrices exceed the enumeration cap {cap}")
    mats = list(enumerate_morphisms(semiring, n, n))
    ident = _identity_entries(semiring, n)
    out = []
    for a in mats:
        found = None
        for b in mats:
            if _product_equals(semiring, a.entries, b.entries, ident) and _product_equals(
                    semiring, b.entries, a.entries, ident):
                found = b
                break
        if found is not None:
            out.append((a, found))
    _INVERTIBLE_CACHE[cache_key] = out
    return out


def random_invertible(semiring, n, rng, cap=DEFAULT_INVERT_CAP):
    pool = invertible_morphisms(semiring, n, cap)
    return pool[rng.randrange(len(pool))]


# ---------------------------------------------------------------------------
# iso families, functors, skeleton transport


class IsoFamily:
    """Assignment of a verified invertible morphism to each covered object."""

    def __init__(self, assignments, require_canonical_identity=False):
        self._iso = {}
        self._inv = {}
        for obj, morphism in assignments.items():
            obj = _as_object(obj)
            if morphism.dom != obj:
                raise MissingIso(f"iso for {obj} does not start at it")
            inv = invert(morphism)
            if inv is None:
                raise NonInvertibleFamily(f"iso for {obj} has no two-sided inverse")
            if require_canonical_identity and obj.is_canonical and not morphism.is_identity():
                raise MissingIso(f"canonical object {obj} must carry the identity")
            self._iso[obj] = morphism
            self._inv[obj] = inv

    @classmethod
    def identities(cls, semiring, objects):
        return cls({obj: identity(semiring, obj) for obj in objects})

    def covers(self, obj):
        return _as_object(obj) in self._iso

    def objects(self):
        return list(self._iso)

    def iso(self, obj):
        obj = _as_object(obj)
        if obj not in self._iso:
            raise MissingIso(f"no isomorphism assigned to {obj}")
        return self._iso[obj]

    def inv(self, obj):
        obj = _as_object(obj)
        if obj not in self._inv:
            raise MissingIso(f"no isomorphism assigned to {obj}")
        return self._inv[obj]


class BlackBoxFunctor:
    """An opaque endofunctor on the rank-truncated matrix category.

    Nothing is checked at construction; verification is an explicit operation.
    The morphism action must be pure (it may be swept in parallel).
    """

    def __init__(self, semiring, morphism_action, object_action=None, cap=2,
                 name="functor"):
        self.semiring = semiring
        self.morphism_action = morphism_action
        self.object_action = object_action
        self.cap = cap
        self.name = name

    def on_object(self, obj):
        obj = _as_object(obj)
        if self.object_action is None:
            return obj
        return self.object_action(obj)

    def on_morphism(self, m):
        image = self.morphism_action(m)
        expected_dom = self.on_object(m.dom)
        expected_cod = self.on_object(m.cod)
        if image.dom != expected_dom or image.cod != expected_cod:
            raise DimensionMismatch(
                f"{self.name} sent {m.dom}->{m.cod} to {image.dom}->{image.cod}")
        return image

    def __repr__(self):
        return f"<functor {self.name} cap={self.cap}>"


def identity_functor(semiring, cap=2):
    return BlackBoxFunctor(semiring, lambda m: m, cap=cap, name="identity")


def skeleton_transport(phi_bar, isos):
    """Extend a functor defined on canonical objects to labeled ones.

    The extension conjugates through the supplied object isomorphisms: a
    morphism is transported to the skeleton, pushed through phi_bar, and
    transported back.  On canonical objects (identity isos) it agrees with
    phi_bar exactly.  Rank-0 objects need no assignment: their isomorphism to
    the skeleton is the unique empty morphism.
    """
    R = phi_bar.semiring

    def iso_pair(obj):
        if isos.covers(obj):
            return isos.iso(obj), isos.inv(obj)
        if obj.rank == 0:
            return (Morphism(R, obj, canonical(0), ()),
                    Morphism(R, canonical(0), obj, ()))
        raise MissingIso(f"iso family does not cover {obj}")

    def action(f):
        dom_iso, dom_inv = iso_pair(f.dom)
        cod_iso, cod_inv = iso_pair(f.cod)
        inner = dom_inv.then(f).then(cod_iso)
        image = phi_bar.on_morphism(inner)
        return dom_iso.then(image).then(cod_inv)

    return BlackBoxFunctor(
        phi_bar.semiring, action, cap=phi_bar.cap,
        name=f"{phi_bar.name}^transported")
