import itertools
import random

import pytest

from semicat import autfunctors as A
from semicat import matcat as M
from semicat import semirings as S
from semicat.errors import (
    CapMismatch,
    EquivalenceViolation,
    InjectionsNotFixed,
    NonInvertibleFamily,
    SearchCapExceeded,
)
from support import all_shape_morphisms

B = S.boolean_semiring()
F4 = S.galois_semiring(4)
Z4 = S.zmod_semiring(4)
F4_GROUPS = S.automorphism_groups(F4)
FROB = F4_GROUPS.aut[1]


def skew(sigma, cap=2):
    return A.semi_inner_functor(A.skew_inner_functor(sigma, cap))


def test_skew_identity_is_identity_functor():
    ident = skew(S.identity_automorphism(B))
    for f in all_shape_morphisms(B, 2):
        assert ident.on_morphism(f) == f


def test_skew_frobenius_on_scalars():
    functor = skew(FROB)
    alpha = 2
    image = functor.on_morphism(M.from_entries(F4, [[alpha]]))
    assert image.entries == ((F4.mul(alpha, alpha),),)


def test_skew_product_swap():
    z2 = S.zmod_semiring(2)
    prod = S.product_semiring(z2, z2)
    swap = S.automorphism_groups(prod).aut[1]
    # (1,0) and (0,1) encode as indices 2 and 1; the swap exchanges them
    f = M.from_entries(prod, [[2, 1]])
    assert skew(swap).on_morphism(f).entries == ((1, 2),)


def test_skew_vector_diagram_commutes():
    # applying the carrier map to a vector, then the image matrix, matches
    # mapping the matrix action of the original vector
    functor = skew(FROB)
    for n, m in ((1, 1), (1, 2), (2, 1), (2, 2)):
        vectors = list(itertools.product(range(4), repeat=n))
        for f in M.enumerate_morphisms(F4, n, m):
            image = functor.on_morphism(f)
            for vec in vectors:
                mapped_vec = tuple(FROB.apply(x) for x in vec)
                lhs = tuple(FROB.apply(x) for x in f.act(vec))
                assert lhs == image.act(mapped_vec)


def test_semi_inner_is_conjugation():
    permutation = M.from_entries(B, [[0, 1], [1, 0]])
    data = A.SemiInnerData(
        semiring=B, sigma=S.identity_automorphism(B),
        family={2: permutation}, cap=2)
    functor = A.semi_inner_functor(data)
    sample = M.from_entries(B, [[1, 1], [0, 1]])
    expected = permutation.then(sample).then(permutation)  # the swap is self-inverse
    assert functor.on_morphism(sample) == expected


def test_semi_inner_identity_family_is_skew():
    data = A.SemiInnerData(semiring=F4, sigma=FROB, family={}, cap=2)
    functor = A.semi_inner_functor(data)
    for f in all_shape_morphisms(F4, 2):
        assert functor.on_morphism(f) == f.map_entries(FROB.apply)


def test_semi_inner_random_family_verifies():
    rng = random.Random(21)
    data = A.random_semi_inner_data(F4, 2, rng, F4_GROUPS)
    assert A.verify_functor(A.semi_inner_functor(data)).passed
    frob_data = A.SemiInnerData(
        semiring=F4, sigma=FROB,
        family={n: M.random_invertible(F4, n, rng)[0] for n in (1, 2)}, cap=2)
    assert A.verify_functor(A.semi_inner_functor(frob_data)).passed


def test_semi_inner_rejects_singular_family():
    singular = M.from_entries(B, [[1, 1], [1, 1]])
    data = A.SemiInnerData(
        semiring=B, sigma=S.identity_automorphism(B),
        family={2: singular}, cap=2)
    with pytest.raises(NonInvertibleFamily):
        A.semi_inner_functor(data)


def test_verify_functor_passes_identity_and_skew():
    assert A.verify_functor(M.identity_functor(F4, cap=2)).passed
    assert A.verify_functor(skew(FROB)).passed


def test_verify_functor_flags_corruption():
    poison = M.from_entries(F4, [[2, 0], [0, 1]])

    def corrupt(f):
        if f == poison:
            return M.zero_morphism(F4, f.dom, f.cod)
        return f.map_entries(FROB.apply)

    report = A.verify_functor(M.BlackBoxFunctor(F4, corrupt, cap=2, name="corrupt"))
    assert not report.passed
    assert report.record("composition-preservation").status == "fail"
    assert report.record("composition-preservation").witness


def test_verify_functor_rejects_rank_change():
    shifted = M.BlackBoxFunctor(
        F4,
        lambda f: M.zero_morphism(F4, f.dom.rank + 1, f.cod.rank + 1),
        object_action=lambda obj: M.FreeObject(obj.rank + 1),
        cap=2, name="rank-shift")
    report = A.verify_functor(shifted)
    assert report.record("object-ranks").status == "fail"


def test_extract_sigma_round_trips():
    z2z2 = S.product_semiring(S.zmod_semiring(2), S.zmod_semiring(2))
    for semiring in (B, S.trivial_semiring(), Z4, F4, z2z2):
        for sigma in S.automorphism_groups(semiring).aut:
            recovered = A.extract_sigma(skew(sigma))
            assert recovered.perm == sigma.perm


def test_extract_sigma_rejects_non_bijective_scalar_action():
    from semicat.errors import NotAnAutomorphism

    def squaring(f):
        return f.map_entries(lambda r: Z4.mul(r, r))

    functor = M.BlackBoxFunctor(Z4, squaring, cap=2, name="squaring-mod-4")
    # injections carry only 0/1 entries, so they stay fixed; the scalar
    # action 0,1,0,1 is not a bijection
    with pytest.raises(NotAnAutomorphism):
        A.extract_sigma(functor)


def test_normalize_rejects_non_additive_box():
    from semicat.errors import NonInvertibleStack

    dead_row = M.biproduct_system(F4, 2).injections[0]

    def collapse(f):
        if f == dead_row:
            return M.zero_morphism(F4, f.dom, f.cod)
        return f

    functor = M.BlackBoxFunctor(F4, collapse, cap=2, name="row-collapser")
    with pytest.raises(NonInvertibleStack):
        A.normalize_injections(functor)


def test_extract_sigma_requires_fixed_injections():
    swap = M.from_entries(F4, [[0, 1], [1, 0]])
    data = A.SemiInnerData(
        semiring=F4, sigma=S.identity_automorphism(F4),
        family={2: swap}, cap=2)
    with pytest.raises(InjectionsNotFixed):
        A.extract_sigma(A.semi_inner_functor(data))


def test_normalize_fixed_point_and_round_trip():
    functor = skew(FROB)
    normalized, witness = A.normalize_injections(functor)
    for f in all_shape_morphisms(F4, 2):
        assert normalized.on_morphism(f) == functor.on_morphism(f)
    assert all(witness.component(n).is_identity() for n in (1, 2))


def test_normalize_semi_inner_recovers_skew():
    rng = random.Random(33)
    for _ in range(5):
        data = A.random_semi_inner_data(F4, 2, rng, F4_GROUPS)
        functor = A.semi_inner_functor(data)
        normalized, witness = A.normalize_injections(functor)
        sigma = A.extract_sigma(normalized)
        assert sigma.perm == data.sigma.perm
        reference = skew(sigma)
        for f in all_shape_morphisms(F4, 2):
            assert normalized.on_morphism(f) == reference.on_morphism(f)
            # witness equation: original = conjugated normalized image
            assert functor.on_morphism(f) == witness.conjugate(
                normalized.on_morphism(f))
            assert witness.square_commutes(
                normalized.on_morphism(f), functor.on_morphism(f))


def test_normalize_inner_over_z2_gives_identity():
    z2 = S.zmod_semiring(2)
    rng = random.Random(5)
    family = {n: M.random_invertible(z2, n, rng)[0] for n in (1, 2)}
    data = A.SemiInnerData(
        semiring=z2, sigma=S.identity_automorphism(z2), family=family, cap=2)
    normalized, _ = A.normalize_injections(A.semi_inner_functor(data))
    for f in all_shape_morphisms(z2, 2):
        assert normalized.on_morphism(f) == f


def test_normalize_idempotent():
    rng = random.Random(11)
    data = A.random_semi_inner_data(Z4, 2, rng)
    first, _ = A.normalize_injections(A.semi_inner_functor(data))
    second, witness = A.normalize_injections(first)
    for f in all_shape_morphisms(Z4, 2):
        assert second.on_morphism(f) == first.on_morphism(f)
    assert all(witness.component(n).is_identity() for n in (1, 2))


def test_decompose_identity_isos():
    functor = skew(FROB)
    isos = M.IsoFamily.identities(F4, [M.canonical(1), M.canonical(2)])
    stable, inner = A.decompose_stable_inner(functor, isos)
    for f in all_shape_morphisms(F4, 2):
        assert stable.on_morphism(f) == functor.on_morphism(f)
        assert inner.on_morphism(f) == f


def test_decompose_conjugation_collapses():
    rng = random.Random(17)
    family = {n: M.random_invertible(F4, n, rng)[0] for n in (1, 2)}
    data = A.SemiInnerData(
        semiring=F4, sigma=S.identity_automorphism(F4), family=family, cap=2)
    functor = A.semi_inner_functor(data)
    # the conjugating family itself splits the functor exactly
    isos = M.IsoFamily({M.canonical(n): family[n] for n in (1, 2)})
    stable, _ = A.decompose_stable_inner(functor, isos)
    for f in all_shape_morphisms(F4, 2):
        assert stable.on_morphism(f) == f


def test_decompose_recomposition():
    rng = random.Random(29)
    functor = skew(FROB)
    isos = M.IsoFamily({
        M.canonical(n): M.random_invertible(F4, n, rng)[0] for n in (1, 2)
    })
    stable, inner = A.decompose_stable_inner(functor, isos)
    recomposed = A.compose_functors(stable, inner)
    for f in list(M.enumerate_morphisms(F4, 1, 1)) + [
            M.random_morphism(F4, 2, 2, rng) for _ in range(40)]:
        assert recomposed.on_morphism(f) == functor.on_morphism(f)


def test_compose_semi_inner_neutral_and_skew():
    ident = A.skew_inner_functor(S.identity_automorphism(F4), 2)
    frob_data = A.skew_inner_functor(FROB, 2)
    composite = A.compose_semi_inner(ident, frob_data)
    assert composite.sigma.perm == FROB.perm and not composite.family
    both = A.compose_semi_inner(frob_data, frob_data)
    assert both.sigma.perm == S.identity_automorphism(F4).perm


def test_compose_semi_inner_matches_pointwise():
    rng = random.Random(41)
    a = A.random_semi_inner_data(F4, 2, rng, F4_GROUPS)
    b = A.random_semi_inner_data(F4, 2, rng, F4_GROUPS)
    composite = A.semi_inner_functor(A.compose_semi_inner(a, b))
    assert A.verify_functor(composite).passed
    pointwise = A.compose_functors(A.semi_inner_functor(a), A.semi_inner_functor(b))
    for f in all_shape_morphisms(F4, 2):
        assert composite.on_morphism(f) == pointwise.on_morphism(f)


def test_compose_semi_inner_cap_mismatch():
    with pytest.raises(CapMismatch):
        A.compose_semi_inner(
            A.skew_inner_functor(FROB, 2), A.skew_inner_functor(FROB, 3))


def test_inner_witness_reconstruction_and_fresh_samples():
    rng = random.Random(53)
    family = {n: M.random_invertible(Z4, n, rng)[0] for n in (1, 2)}
    data = A.SemiInnerData(
        semiring=Z4, sigma=S.identity_automorphism(Z4), family=family, cap=2)
    functor = A.semi_inner_functor(data)
    witness = A.inner_witness(functor)
    assert witness is not None
    for f in all_shape_morphisms(Z4, 2):  # includes morphisms never sampled
        assert functor.on_morphism(f) == witness.conjugate(f)


def test_inner_witness_identity():
    witness = A.inner_witness(M.identity_functor(F4, cap=2))
    assert witness is not None
    assert all(witness.component(n).is_identity() for n in (1, 2))


def test_inner_witness_refutes_frobenius():
    assert A.inner_witness(skew(FROB)) is None


def test_inner_witness_budget_is_distinct_from_refutation():
    with pytest.raises(SearchCapExceeded):
        A.inner_witness(skew(FROB), budget=3)


def test_reduction_check_identity_and_skew():
    report = A.reduction_precondition_check(M.identity_functor(B, cap=2), 2)
    assert report.left_side and report.right_side and report.agree
    report = A.reduction_precondition_check(skew(FROB), 2)
    assert not report.left_side and not report.right_side and report.agree


def test_reduction_check_catches_non_functor():
    system = M.biproduct_system(B, 2)
    moved = M.from_entries(B, [[1], [0]], dom=M.canonical(2), cod=M.canonical(1))

    def fake(f):
        if f == system.codiagonal:
            return moved
        return f

    with pytest.raises(EquivalenceViolation):
        A.reduction_precondition_check(
            M.BlackBoxFunctor(B, fake, cap=2, name="codiag-mover"), 2)


def test_certification_pipeline_for_composites():
    # a composite of a conjugation, an entrywise action, and another
    # conjugation is certified by normalize -> extract -> re-verify
    rng = random.Random(61)
    for semiring, groups in ((F4, F4_GROUPS), (Z4, S.automorphism_groups(Z4))):
        ident = S.identity_automorphism(semiring)
        for _ in range(5):
            inner_one = A.SemiInnerData(
                semiring=semiring, sigma=ident,
                family={n: M.random_invertible(semiring, n, rng)[0] for n in (1, 2)},
                cap=2)
            sigma = groups.aut[rng.randrange(len(groups.aut))]
            inner_two = A.SemiInnerData(
                semiring=semiring, sigma=ident,
                family={n: M.random_invertible(semiring, n, rng)[0] for n in (1, 2)},
                cap=2)
            composite = A.compose_functors(
                A.compose_functors(
                    A.semi_inner_functor(inner_one),
                    skew(sigma)),
                A.semi_inner_functor(inner_two))
            normalized, witness = A.normalize_injections(composite)
            recovered = A.extract_sigma(normalized)
            reference = skew(recovered)
            for f in all_shape_morphisms(semiring, 2):
                assert normalized.on_morphism(f) == reference.on_morphism(f)
                assert composite.on_morphism(f) == witness.conjugate(
                    normalized.on_morphism(f))
            assert A.verify_functor(normalized, budget=2000, seed=7).passed


def test_outer_group_counts():
    assert A.outer_group_experiment(B, 2).class_count == 1
    assert A.outer_group_experiment(Z4, 2).class_count == 1
    report = A.outer_group_experiment(F4, 2)
    assert report.class_count == 2 and report.consistent
    z2z2 = S.product_semiring(S.zmod_semiring(2), S.zmod_semiring(2))
    report = A.outer_group_experiment(z2z2, 2)
    assert report.class_count == 2 and report.consistent


def test_outer_group_reports_bounds_when_undecided():
    # starve the witness search so every pair stays undecided
    report = A.outer_group_experiment(F4, 2, budget=2)
    assert report.undecided and not report.consistent
    assert report.class_count == 2  # no confirmed merges: upper bound
    assert report.class_count_lower_bound == 1


def test_outer_group_larger_fields_and_a_noncommutative_carrier():
    from support import upper_triangular_boolean

    report = A.outer_group_experiment(S.galois_semiring(8), 2)
    assert report.class_count == report.out_order == 3 and report.consistent
    report = A.outer_group_experiment(S.galois_semiring(9), 2)
    assert report.class_count == report.out_order == 2 and report.consistent
    report = A.outer_group_experiment(upper_triangular_boolean(), 1)
    assert report.class_count == report.out_order == 1 and report.consistent
