"""Shared helpers for the test suite: perturbation generators, independent
oracles, and small enumeration utilities kept separate from the library."""

import itertools

from semicat import semirings as S
from semicat.errors import AxiomViolation


def catalog_finite():
    return [
        S.boolean_semiring(),
        S.zmod_semiring(4),
        S.galois_semiring(4),
        S.trivial_semiring(),
    ]


def catalog_infinite():
    return [S.NaturalsSemiring(), S.IntegersSemiring(), S.TropicalSemiring()]


def catalog_all():
    return catalog_finite() + catalog_infinite()


def upper_triangular_boolean():
    """The eight 2x2 upper-triangular boolean matrices, as a table semiring.

    Elements are encoded as a*4 + b*2 + c for the matrix [[a, b], [0, c]];
    a genuinely noncommutative catalog extra.
    """

    def unpack(i):
        return (i >> 2) & 1, (i >> 1) & 1, i & 1

    def pack(a, b, c):
        return a * 4 + b * 2 + c

    def b_or(x, y):
        return x | y

    size = 8
    add = [[0] * size for _ in range(size)]
    mul = [[0] * size for _ in range(size)]
    for i in range(size):
        a1, b1, c1 = unpack(i)
        for j in range(size):
            a2, b2, c2 = unpack(j)
            add[i][j] = pack(b_or(a1, a2), b_or(b1, b2), b_or(c1, c2))
            mul[i][j] = pack(a1 & a2, (a1 & b2) | (b1 & c2), c1 & c2)
    return S.validate_semiring(add, mul, pack(0, 0, 0), pack(1, 0, 1), "ut2(boolean)")


def single_entry_perturbations(semiring):
    """All tables differing from the input in exactly one cell, in a fixed order."""
    size = semiring.size
    for which in ("add", "mul"):
        base = semiring.add_table if which == "add" else semiring.mul_table
        for i in range(size):
            for j in range(size):
                for value in range(size):
                    if value == base[i][j]:
                        continue
                    table = [list(row) for row in base]
                    table[i][j] = value
                    if which == "add":
                        yield (which, i, j, value), table, [
                            list(r) for r in semiring.mul_table]
                    else:
                        yield (which, i, j, value), [
                            list(r) for r in semiring.add_table], table


def rejected_perturbations(semiring, limit):
    """The first ``limit`` single-entry perturbations that validate rejects,
    each with its (verified-incorrect) witness."""
    out = []
    for where, add, mul in single_entry_perturbations(semiring):
        try:
            S.validate_semiring(add, mul, semiring.zero, semiring.one)
        except AxiomViolation as exc:
            out.append((where, add, mul, exc))
            if len(out) == limit:
                break
    return out


def monomials_up_to(envelope, degree):
    """Every PBW monomial of total degree <= the bound, unit coefficient."""
    dim = envelope.lie.dim
    out = []
    for total in range(degree + 1):
        for word in itertools.combinations_with_replacement(range(dim), total):
            exp = [0] * dim
            for letter in word:
                exp[letter] += 1
            out.append(envelope.monomial(exp))
    return out


def all_shape_morphisms(semiring, max_rank, include_zero_rank=False):
    from semicat import matcat as M

    low = 0 if include_zero_rank else 1
    out = []
    for n in range(low, max_rank + 1):
        for m in range(low, max_rank + 1):
            out.extend(M.enumerate_morphisms(semiring, n, m))
    return out
