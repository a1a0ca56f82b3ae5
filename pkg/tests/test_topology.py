"""Covering collections, saturation, sieves, and the topology axioms."""
import itertools

import pytest
from hypothesis import given, settings, strategies as st

import sitoform as sf
from sitoform.topology import all_sieves, principal_sieve


def _collection(c, members):
    return sf.MorphismCollection(c, frozenset(members))


def test_identities_are_semi_localizing(two_object_cover, cospan_category):
    for c in (two_object_cover, cospan_category):
        ok, cond, wit = sf.is_semi_localizing(sf.MorphismCollection.identities(c))
        assert ok


def test_all_morphisms_semi_localizing_on_group_site(s3_gsets):
    site, _ = s3_gsets
    ok, _, _ = sf.is_semi_localizing(
        sf.MorphismCollection.all_morphisms(site.category)
    )
    assert ok


def test_cospan_with_one_leg_fails_ore(cospan_category):
    c = cospan_category
    t = _collection(c, set(c.identity.values()) | {"f"})
    ok, cond, wit = sf.is_semi_localizing(t)
    assert not ok and cond == 3
    assert set(wit) == {"f", "g"}


def test_saturate_identities_gives_split_epis(two_object_cover):
    c = two_object_cover
    sat = sf.saturate(sf.MorphismCollection.identities(c))
    assert sat.members == {"id:P", "id:T", "s"}  # p has no section


def test_saturate_offset_zero_is_closed():
    site = sf.build_successor_site(6, plus=True)
    sat = sf.saturate(site.topology.basis)
    assert sat.members == site.topology.basis.members


def test_saturate_all_is_all(two_object_cover):
    c = two_object_cover
    t = sf.MorphismCollection.all_morphisms(c)
    assert sf.saturate(t).members == t.members


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_saturate_idempotent_and_monotone(two_object_site, data):
    c = two_object_site.category
    subset = data.draw(st.sets(st.sampled_from(sorted(c.morphisms))))
    t = _collection(c, subset)
    sat = sf.saturate(t)
    assert sf.saturate(sat).members == sat.members
    bigger = _collection(c, subset | set(c.identity.values()))
    assert sat.members <= sf.saturate(bigger).members
    assert bigger.members <= sf.saturate(bigger).members  # contains t with ids


def test_sieve_of_identity_is_maximal(two_object_cover):
    c = two_object_cover
    s = sf.sieve_generated(c, "T", ["id:T"])
    assert s.members == set(c.into("T"))


def test_principal_sieve_collapses(two_object_cover):
    s = principal_sieve(two_object_cover, "p")
    assert s.members == {"p"}  # p∘s = p


def test_empty_generators_empty_sieve(two_object_cover):
    s = sf.sieve_generated(two_object_cover, "T", [])
    assert s.members == frozenset()


def test_generator_target_mismatch(two_object_cover):
    with pytest.raises(sf.InputError):
        sf.sieve_generated(two_object_cover, "P", ["p"])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_generated_sieves_are_closed(s3_gsets, data):
    site, _ = s3_gsets
    c = site.category
    apex = data.draw(st.sampled_from(sorted(c.objects)))
    gens = data.draw(st.sets(st.sampled_from(sorted(c.into(apex)) or [""])))
    gens = {g for g in gens if g}
    s = sf.sieve_generated(c, apex, gens)
    assert s.is_closed()
    for f in c.into(apex):
        assert sf.pullback_sieve(s, f).is_closed()


def test_pullback_along_identity(two_object_cover):
    c = two_object_cover
    s = principal_sieve(c, "p")
    assert sf.pullback_sieve(s, "id:T").members == s.members


def test_pullback_of_projection_sieve_is_maximal(two_object_cover):
    c = two_object_cover
    s = principal_sieve(c, "p")
    back = sf.pullback_sieve(s, "p")
    assert back.members == set(c.into("P"))


def test_pullback_of_empty_sieve(two_object_cover):
    c = two_object_cover
    empty = sf.Sieve(c, "T", frozenset())
    assert sf.pullback_sieve(empty, "p").members == frozenset()


def test_in_topology(two_object_site):
    c = two_object_site.category
    j = two_object_site.topology
    assert sf.in_topology(j, sf.topology.maximal_sieve(c, "T"))
    assert sf.in_topology(j, principal_sieve(c, "p"))
    assert not sf.in_topology(j, sf.Sieve(c, "T", frozenset()))


def test_covering_collection_atomic(two_object_site):
    got = sf.covering_collection(two_object_site.topology)
    assert got.members == frozenset(two_object_site.category.morphisms)


def test_covering_collection_offset_zero():
    site = sf.build_successor_site(5, plus=True)
    got = sf.covering_collection(site.topology)
    assert got.members == site.topology.basis.members


def test_covering_collection_identities(two_object_cover):
    j = sf.ATopology(
        two_object_cover, sf.MorphismCollection.identities(two_object_cover)
    )
    got = sf.covering_collection(j)
    assert got.members == sf.saturate(j.basis).members == {"id:P", "id:T", "s"}


def test_topology_axioms_atomic(two_object_site):
    assert sf.verify_topology_axioms(two_object_site.topology).clean


def test_topology_axioms_identities(two_object_cover):
    j = sf.ATopology(
        two_object_cover, sf.MorphismCollection.identities(two_object_cover)
    )
    assert sf.verify_topology_axioms(j).clean


def test_topology_axioms_fail_without_ore(cospan_category):
    # all morphisms on a category without completion squares: stability fails
    j = sf.ATopology(
        cospan_category,
        sf.MorphismCollection.all_morphisms(cospan_category),
        check=False,
    )
    ok, cond, wit = sf.is_semi_localizing(j.basis)
    assert not ok and cond == 3
    rep = sf.verify_topology_axioms(j)
    assert not rep.passed
    assert any(f.condition == "axiom-2" for f in rep.findings)


def test_sieve_cap_resource_error(s3_gsets):
    site, _ = s3_gsets
    free = max(site.category.objects, key=lambda o: len(site.category.into(o)))
    with pytest.raises(sf.ResourceLimitError):
        all_sieves(site.category, free, cap=2)


def test_principal_only_mode(s3_gsets):
    site, _ = s3_gsets
    rep = sf.verify_topology_axioms(site.topology, cap=2)
    assert rep.clean or rep.passed
    assert "principal-only" in rep.notes


def test_membership_agrees_with_saturated_basis(two_object_site):
    # the topology of a basis and of its saturation agree on every sieve
    c = two_object_site.category
    j1 = two_object_site.topology
    j2 = sf.ATopology(c, sf.saturate(j1.basis))
    for x in c.objects:
        for s in all_sieves(c, x):
            assert sf.in_topology(j1, s) == sf.in_topology(j2, s)
