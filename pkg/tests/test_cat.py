"""Category layer: validation, epis, connectivity, slices, skeletons,
quotient objects."""
import pytest

import sitoform as sf
from sitoform.cat import FiniteCategory, Mor


def test_terminal_category_valid(terminal_category):
    assert sf.validate_category(terminal_category).clean


def test_two_object_cover_valid(two_object_cover):
    assert sf.validate_category(two_object_cover).clean


def test_flip_to_idempotent_mutation_stays_lawful(two_object_cover):
    # redefining s∘s from the identity to s yields the idempotent-monoid
    # category: the brute-force law check is the oracle, and every law holds
    c = two_object_cover
    comp = dict(c.composition)
    comp[("s", "s")] = "s"
    mutated = FiniteCategory(
        c.objects,
        [Mor(m, c.src(m), c.dst(m)) for m in c.morphisms],
        c.identity,
        comp,
    )
    assert sf.validate_category(mutated).clean
    # but the flip is gone: s is no longer an isomorphism
    assert not mutated.is_iso("s")


def test_law_breaking_mutations_detected(two_object_cover):
    # every single-entry mutation other than the idempotent one above
    # breaks a law and is reported
    c = two_object_cover
    for key in c.composition:
        g, f = key
        for other in c.morphisms:
            if other == c.composition[key] or (key, other) == (("s", "s"), "s"):
                continue
            if c.src(other) != c.src(f) or c.dst(other) != c.dst(g):
                continue  # endpoint mismatches are found trivially
            comp = dict(c.composition)
            comp[key] = other
            broken = FiniteCategory(
                c.objects,
                [Mor(m, c.src(m), c.dst(m)) for m in c.morphisms],
                c.identity,
                comp,
            )
            assert not sf.validate_category(broken).passed, (key, other)


def test_duplicate_ids_rejected():
    with pytest.raises(sf.InputError):
        FiniteCategory(
            ["a", "a"], [Mor("id:a", "a", "a")], {"a": "id:a"}, {}
        )


def test_identities_are_epimorphisms(two_object_cover):
    epis = sf.epimorphisms(two_object_cover)
    assert set(two_object_cover.identity.values()) <= epis


def test_two_object_cover_is_e_category(two_object_cover):
    assert sf.epimorphisms(two_object_cover) == frozenset(two_object_cover.morphisms)
    assert sf.is_e_category(two_object_cover)


def test_equalized_arrow_is_not_epi(parallel_pair_with_equalizer):
    assert "e" not in sf.epimorphisms(parallel_pair_with_equalizer)
    assert not sf.is_e_category(parallel_pair_with_equalizer)


def test_lambda_connected(terminal_category, two_object_cover, discrete_two):
    assert sf.is_lambda_connected(terminal_category) == (True, None)
    assert sf.is_lambda_connected(two_object_cover) == (True, None)
    ok, witness = sf.is_lambda_connected(discrete_two)
    assert not ok and witness == ("a", "b")


def test_lambda_connected_empty_category_rejected():
    empty = FiniteCategory([], [], {}, {})
    with pytest.raises(sf.InputError):
        sf.is_lambda_connected(empty)


def test_semi_cofiltered(two_object_cover, cospan_category):
    assert sf.is_semi_cofiltered(two_object_cover) == (True, None)
    ok, witness = sf.is_semi_cofiltered(cospan_category)
    assert not ok
    assert set(witness) == {"f", "g"}


def test_poset_is_semi_cofiltered():
    # chain a <= b: binary lower bounds exist
    chain = FiniteCategory(
        ["a", "b"],
        [Mor("id:a", "a", "a"), Mor("id:b", "b", "b"), Mor("le", "a", "b")],
        {"a": "id:a", "b": "id:b"},
        {
            ("id:a", "id:a"): "id:a",
            ("id:b", "id:b"): "id:b",
            ("le", "id:a"): "le",
            ("id:b", "le"): "le",
        },
    )
    assert sf.is_semi_cofiltered(chain) == (True, None)


# -- slices ----------------------------------------------------------------


def test_slice_terminal(terminal_category):
    sl, forget = sf.slice_category(terminal_category, "*", "over")
    assert len(sl.objects) == 1
    assert not forget.validate()


def test_slice_over(two_object_cover):
    sl, forget = sf.slice_category(two_object_cover, "T", "over")
    assert set(sl.objects) == {"id:T", "p"}
    assert len(sl.hom("p", "p")) == 2  # carried by id:P and s
    assert len(sl.hom("p", "id:T")) == 1
    assert len(sl.hom("id:T", "p")) == 0
    assert not forget.validate()
    # object count equals the number of morphisms into T
    assert len(sl.objects) == len(two_object_cover.into("T"))


def test_slice_under(two_object_cover):
    un, forget = sf.slice_category(two_object_cover, "P", "under")
    assert set(un.objects) == {"id:P", "s", "p"}
    assert not forget.validate()
    assert sf.validate_category(un).clean


# -- skeletons ---------------------------------------------------------------


def _thin_with_isos():
    # a ≅ b, both below c
    objects = ["a", "b", "c"]
    mors = [
        Mor("id:a", "a", "a"),
        Mor("id:b", "b", "b"),
        Mor("id:c", "c", "c"),
        Mor("i", "a", "b"),
        Mor("j", "b", "a"),
        Mor("u", "a", "c"),
        Mor("v", "b", "c"),
    ]
    identity = {x: f"id:{x}" for x in objects}
    comp = {
        ("j", "i"): "id:a",
        ("i", "j"): "id:b",
        ("v", "i"): "u",
        ("u", "j"): "v",
    }
    for m in mors:
        comp[(m.name, f"id:{m.src}")] = m.name
        comp[(f"id:{m.dst}", m.name)] = m.name
    return FiniteCategory(objects, mors, identity, comp)


def test_poset_skeleton_of_poset_is_identity():
    chain = _thin_with_isos()
    skel, collapse = sf.poset_skeleton(chain)
    assert set(skel.objects) == {"a", "c"}
    assert collapse.obj_map["b"] == "a"
    assert not collapse.validate()
    rep = sf.validate_category(skel)
    assert rep.clean
    thin, _ = sf.cat.is_thin(skel)
    assert thin
    # skeletal: no two distinct isomorphic objects
    assert all(
        not (skel.hom(x, y) and skel.hom(y, x))
        for x in skel.objects
        for y in skel.objects
        if x != y
    )


def test_poset_skeleton_idempotent_on_posets():
    chain = _thin_with_isos()
    skel, _ = sf.poset_skeleton(chain)
    again, collapse = sf.poset_skeleton(skel)
    assert again.objects == skel.objects
    assert set(again.morphisms) == set(skel.morphisms)
    assert all(collapse.obj_map[x] == x for x in skel.objects)


def test_poset_skeleton_rejects_non_thin(two_object_cover):
    with pytest.raises(sf.InputError) as e:
        sf.poset_skeleton(two_object_cover)
    assert "('P', 'P')" in str(e.value)


# -- quotient objects -----------------------------------------------------------


def test_quotient_by_trivial_group(two_object_cover):
    assert sf.quotient_object(two_object_cover, "P", {"id:P"}) == ("P", "id:P")


def test_quotient_by_flip(two_object_cover):
    assert sf.quotient_object(two_object_cover, "P", {"id:P", "s"}) == ("T", "p")


def test_quotient_canonical_morphism_is_epi(two_object_cover):
    x, can = sf.quotient_object(two_object_cover, "P", {"id:P", "s"})
    assert can in sf.epimorphisms(two_object_cover)


def test_quotient_discrete(discrete_two):
    assert sf.quotient_object(discrete_two, "a", {"id:a"}) == ("a", "id:a")
    with pytest.raises(sf.InputError):
        sf.quotient_object(discrete_two, "a", {"id:a", "id:b"})


def test_quotient_rejects_non_group(two_object_cover):
    with pytest.raises(sf.InputError):
        sf.quotient_object(two_object_cover, "P", {"s"})  # lacks the identity
    with pytest.raises(sf.InputError):
        sf.quotient_object(two_object_cover, "P", {"id:P", "p"})  # not an endo


# -- functors and natural isomorphisms ----------------------------------------


def test_functor_validation(two_object_cover, terminal_category):
    collapse = sf.CatFunctor(
        source=two_object_cover,
        target=terminal_category,
        obj_map={"P": "*", "T": "*"},
        mor_map={m: "id:*" for m in two_object_cover.morphisms},
    )
    assert not collapse.validate()
    broken = sf.CatFunctor(
        source=two_object_cover,
        target=terminal_category,
        obj_map={"P": "*", "T": "*"},
        mor_map={},
    )
    assert broken.validate()


def test_natural_iso_validation(two_object_cover):
    ident = sf.CatFunctor(
        source=two_object_cover,
        target=two_object_cover,
        obj_map={x: x for x in two_object_cover.objects},
        mor_map={m: m for m in two_object_cover.morphisms},
    )
    good = sf.NaturalIso(ident, ident, {"P": "id:P", "T": "id:T"})
    assert not good.validate()
    # the flip is central here, so it is also natural
    central = sf.NaturalIso(ident, ident, {"P": "s", "T": "id:T"})
    assert not central.validate()
    # a non-isomorphism component is rejected
    bad = sf.NaturalIso(ident, ident, {"P": "id:P", "T": "p"})
    assert bad.validate()


def test_natural_iso_naturality_failure(s3_gsets):
    # a non-central deck transformation on the free orbit breaks naturality
    site, _ = s3_gsets
    c = site.category
    free = min(o for o in c.objects if len(c.hom(o, o)) == 6)
    ident = sf.CatFunctor(
        source=c,
        target=c,
        obj_map={x: x for x in c.objects},
        mor_map={m: m for m in c.morphisms},
    )
    comps = {x: c.identity[x] for x in c.objects}
    three_cycle = next(
        m for m in c.hom(free, free) if not c.is_identity(m) and c.inverse(m) != m
    )
    comps[free] = three_cycle
    bad = sf.NaturalIso(ident, ident, comps)
    assert any("naturality" in msg for msg in bad.validate())
