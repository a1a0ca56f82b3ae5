"""Pseudo-torsors, Galois coverings, covering categories, torsor systems."""
import itertools

import pytest

import sitoform as sf
from conftest import gsets_object


# -- pseudo-torsors ---------------------------------------------------------


def test_pseudo_torsor_trivial_group_injective():
    g = sf.GroupTable.trivial()
    act = sf.GroupAction(g, ("x", "y"), {("1", "x"): "x", ("1", "y"): "y"})
    ok, cond = sf.is_pseudo_torsor({"x": "a", "y": "b"}, act)
    assert ok and cond is None


def test_pseudo_torsor_swap_constant():
    g = sf.GroupTable.cyclic(2)
    act = sf.GroupAction(
        g,
        ("x", "y"),
        {
            ("g0", "x"): "x",
            ("g0", "y"): "y",
            ("g1", "x"): "y",
            ("g1", "y"): "x",
        },
    )
    ok, cond = sf.is_pseudo_torsor({"x": "c", "y": "c"}, act)
    assert ok


def test_pseudo_torsor_trivial_action_fails_freeness():
    g = sf.GroupTable.cyclic(2)
    act = sf.GroupAction(
        g,
        ("x", "y"),
        {
            ("g0", "x"): "x",
            ("g0", "y"): "y",
            ("g1", "x"): "x",
            ("g1", "y"): "y",
        },
    )
    ok, cond = sf.is_pseudo_torsor({"x": "c", "y": "c"}, act)
    assert not ok and cond == 2


def test_pseudo_torsor_orbit_collision():
    g = sf.GroupTable.trivial()
    act = sf.GroupAction(g, ("x", "y"), {("1", "x"): "x", ("1", "y"): "y"})
    ok, cond = sf.is_pseudo_torsor({"x": "c", "y": "c"}, act)
    assert not ok and cond == 3


# -- hom and aut over a base ----------------------------------------------------


def test_aut_over_identity_trivial(two_object_cover):
    g = sf.aut_over(two_object_cover, "id:T")
    assert len(g) == 1


def test_aut_over_projection_is_flip_group(two_object_cover, z2_group):
    g = sf.aut_over(two_object_cover, "p")
    assert set(g.elements) == {"id:P", "s"}
    assert sf.groups_isomorphic(g, z2_group) is not None


def test_hom_over_free_orbit_to_index_two(s3_gsets):
    site, _ = s3_gsets
    c = site.category
    free = gsets_object(site, 1)
    half = gsets_object(site, 2)
    proj = c.hom(free, half)[0]
    assert len(sf.hom_over(c, proj, proj)) == 2


# -- Galois coverings ---------------------------------------------------------------


def test_identity_is_galois(two_object_cover):
    g = sf.is_galois_covering(two_object_cover, "id:P")
    assert g is not None and len(g) == 1


def test_projection_is_galois(two_object_cover, z2_group):
    g = sf.is_galois_covering(two_object_cover, "p")
    assert g is not None
    assert sf.groups_isomorphic(g, z2_group) is not None


def test_index_two_projection_not_galois_in_s3(s3_gsets):
    site, _ = s3_gsets
    c = site.category
    half = gsets_object(site, 2)
    point = gsets_object(site, 6)
    proj = c.hom(half, point)[0]
    assert sf.is_galois_covering(c, proj) is None


def test_deck_group_equals_all_endomorphisms(two_object_cover, s3_gsets):
    # whenever a morphism is a covering, every over-endomorphism inverts
    for c in (two_object_cover, s3_gsets[0].category):
        for f in c.morphisms:
            if sf.is_galois_covering(c, f) is None:
                continue
            ends = sf.end_over(c, f)
            assert all(c.is_iso(h) for h in ends)


def test_fiber_product_size_for_coverings(two_object_cover, s3_gsets):
    # pairs over the base decompose as deck-group-many sheets
    from sitoform.sheaves import fiber_product_pairs

    for site in (None, s3_gsets[0]):
        c = two_object_cover if site is None else site.category
        s = (
            sf.Site(
                category=c,
                topology=sf.ATopology(c, sf.MorphismCollection.all_morphisms(c)),
            )
            if site is None
            else site
        )
        for f in c.morphisms:
            g = sf.is_galois_covering(c, f)
            if g is None:
                continue
            y = c.src(f)
            for z in c.objects:
                pairs = fiber_product_pairs(s, f, z)
                assert len(pairs) == len(g) * len(c.hom(z, y))


def test_deck_group_acts_transitively_over_shared_base(s3_gsets):
    # covering source with a morphism over the base: the deck group is
    # transitive on the over-homs
    site, _ = s3_gsets
    c = site.category
    for f1 in c.morphisms:
        if sf.is_galois_covering(c, f1) is None:
            continue
        for f2 in c.into(c.dst(f1)):
            homs = sf.hom_over(c, f1, f2)
            if not homs:
                continue
            deck = sf.aut_over(c, f1)
            orbit = {c.compose(homs[0], a) for a in deck.elements}
            assert orbit == set(homs)


def test_covering_right_factor_is_covering(s3_gsets):
    # in an all-epi category, a right factor of a covering is a covering
    site, _ = s3_gsets
    c = site.category
    for gm, fm in c.composable_pairs():
        if sf.is_galois_covering(c, c.compose(gm, fm)) is not None:
            assert sf.is_galois_covering(c, fm) is not None, (gm, fm)


# -- enough Galois coverings ----------------------------------------------------------


def test_enough_galois_flip_site(two_object_cover):
    t = sf.MorphismCollection.all_morphisms(two_object_cover)
    assert sf.enough_galois_coverings(two_object_cover, t) == (True, None)


def test_enough_galois_s3(s3_gsets):
    site, _ = s3_gsets
    ok, _ = sf.enough_galois_coverings(site.category, site.topology.basis)
    assert ok


def test_parallel_pair_brute_force():
    # two parallel arrows with nothing mapping in: every morphism is
    # vacuously a covering, so the saturations agree
    from sitoform.cat import FiniteCategory, Mor

    objects = ["a", "b"]
    mors = [
        Mor("id:a", "a", "a"),
        Mor("id:b", "b", "b"),
        Mor("f", "a", "b"),
        Mor("g", "a", "b"),
    ]
    comp = {}
    for m in mors:
        comp[(m.name, f"id:{m.src}")] = m.name
        comp[(f"id:{m.dst}", m.name)] = m.name
    c = FiniteCategory(objects, mors, {"a": "id:a", "b": "id:b"}, comp)
    assert sf.galois_coverings(c) == frozenset(c.morphisms)
    ok, wit = sf.enough_galois_coverings(c, sf.MorphismCollection.all_morphisms(c))
    assert ok


def test_idempotent_collapse_lacks_enough(idempotent_category):
    c = idempotent_category
    assert sf.is_galois_covering(c, "q") is None
    assert sf.is_galois_covering(c, "e") is None
    ok, wit = sf.enough_galois_coverings(c, sf.MorphismCollection.all_morphisms(c))
    assert not ok
    assert wit in {"e", "q"}


# -- the covering category over an object ------------------------------------------------


def test_covering_category_flip(two_object_site):
    gal = sf.galois_category_over(two_object_site, "T")
    assert set(gal.objects) == {"id:T", "p"}
    non_id = [m for m in gal.morphisms if not gal.is_identity(m)]
    assert len(non_id) == 1
    assert gal.src(non_id[0]) == "p" and gal.dst(non_id[0]) == "id:T"


def test_covering_category_terminal(terminal_site):
    gal = sf.galois_category_over(terminal_site, "*")
    assert len(gal.objects) == 1


def test_covering_category_excludes_non_coverings(s3_gsets):
    site, _ = s3_gsets
    point = gsets_object(site, 6)
    half = gsets_object(site, 2)
    gal = sf.galois_category_over(site, point)
    assert len(gal.objects) == 3
    assert all(site.category.src(f) != half for f in gal.objects)


# -- torsor systems --------------------------------------------------------------------


def _translation_torsor(g: sf.GroupTable):
    pts = tuple(f"t{i}" for i in range(len(g)))
    order = {a: i for i, a in enumerate(g.elements)}
    act = {}
    for a in g.elements:
        for i, b in enumerate(g.elements):
            act[(a, pts[i])] = pts[order[g.op(a, b)]]
    return sf.GroupAction(g, pts, act)


def test_single_index_system():
    g = sf.GroupTable.cyclic(3)
    ts = sf.TorsorSystem(
        ("i",), frozenset(), {"i": g}, {}, {"i": _translation_torsor(g)}, {}
    )
    fam = sf.torsor_limit(ts)
    assert fam == {"i": "t0"}


def test_two_index_chain():
    g = sf.GroupTable.cyclic(2)
    t = _translation_torsor(g)
    hom = {("j", "i"): {"g0": "g0", "g1": "g1"}}
    maps = {("j", "i"): {"t0": "t1", "t1": "t0"}}  # shifted, still equivariant
    ts = sf.TorsorSystem(
        ("i", "j"), frozenset({("i", "j")}), {"i": g, "j": g}, hom, {"i": t, "j": t}, maps
    )
    fam = sf.torsor_limit(ts)
    assert fam["i"] == maps[("j", "i")][fam["j"]]


def test_empty_carrier_rejected():
    g = sf.GroupTable.trivial()
    empty = sf.GroupAction(g, (), {})
    ts = sf.TorsorSystem(("i",), frozenset(), {"i": g}, {}, {"i": empty}, {})
    with pytest.raises(sf.InputError):
        sf.torsor_limit(ts)


def test_incoherent_transitions_rejected():
    g = sf.GroupTable.cyclic(2)
    t = _translation_torsor(g)
    idhom = {"g0": "g0", "g1": "g1"}
    swap = {"t0": "t1", "t1": "t0"}
    ident = {"t0": "t0", "t1": "t1"}
    # chain i <= j <= k with maps that do not compose
    ts = sf.TorsorSystem(
        ("i", "j", "k"),
        frozenset({("i", "j"), ("j", "k"), ("i", "k")}),
        {"i": g, "j": g, "k": g},
        {("j", "i"): idhom, ("k", "j"): idhom, ("k", "i"): idhom},
        {"i": t, "j": t, "k": t},
        {("j", "i"): swap, ("k", "j"): ident, ("k", "i"): ident},
    )
    with pytest.raises(sf.InputError):
        sf.torsor_limit(ts)


def test_non_directed_rejected():
    g = sf.GroupTable.trivial()
    t = _translation_torsor(g)
    ts = sf.TorsorSystem(
        ("i", "j"), frozenset(), {"i": g, "j": g}, {}, {"i": t, "j": t}, {}
    )
    with pytest.raises(sf.InputError):
        sf.torsor_limit(ts)


# -- group isomorphism search -------------------------------------------------------------


def test_group_iso_distinguishes_z4_from_klein():
    z4 = sf.GroupTable.cyclic(4)
    v4 = sf.GroupTable.direct_product(sf.GroupTable.cyclic(2), sf.GroupTable.cyclic(2))
    assert sf.groups_isomorphic(z4, v4) is None
    assert sf.groups_isomorphic(z4, z4) is not None


def test_group_iso_s3_selfmap():
    s3 = sf.GroupTable.symmetric(3)
    iso = sf.groups_isomorphic(s3, s3)
    assert iso is not None
    for a in s3.elements:
        for b in s3.elements:
            assert iso[s3.op(a, b)] == s3.op(iso[a], iso[b])
