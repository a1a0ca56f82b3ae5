"""Presheaves, sheaf criteria, sheafification, morphism enumeration."""
import itertools

import pytest

import sitoform as sf
from conftest import gsets_object


@pytest.fixture(scope="module")
def glue_failure(two_object_site):
    """Two sections upstairs collapsing onto one invariant point."""
    return sf.Presheaf(
        two_object_site,
        {"T": ("a", "b"), "P": ("0", "1")},
        {"p": {"a": "0", "b": "0"}, "s": {"0": "0", "1": "1"}},
    )


def test_representable_sections(two_object_site):
    hT = sf.representable(two_object_site, "T")
    assert hT.at("P") == ("p",)
    assert hT.at("T") == ("id:T",)
    hP = sf.representable(two_object_site, "P")
    assert set(hP.at("P")) == {"id:P", "s"}
    assert hP.at("T") == ()


def test_representable_terminal(terminal_site):
    h = sf.representable(terminal_site, "*")
    assert h.at("*") == ("id:*",)


def test_validate_constant_and_representable(two_object_site):
    assert sf.validate_presheaf(sf.constant_presheaf(two_object_site, ("x", "y"))).clean
    for x in two_object_site.category.objects:
        assert sf.validate_presheaf(sf.representable(two_object_site, x)).clean


def test_validate_detects_broken_composite(z4_gsets):
    site, _ = z4_gsets
    c = site.category
    h = sf.representable(site, min(c.objects))
    # corrupt one restriction along a non-generator composite
    broken = {m: dict(t) for m, t in h.restrictions.items()}
    target = None
    for g, f in c.composable_pairs():
        if c.is_identity(g) or c.is_identity(f):
            continue
        gf = c.compose(g, f)
        if not c.is_identity(gf) and broken.get(gf):
            target = (f, g, gf)
            break
    f, g, gf = target
    key = next(iter(broken[gf]))
    vals = h.at(c.src(gf))
    if len(vals) > 1:
        other = next(v for v in vals if v != broken[gf][key])
        broken[gf][key] = other
        bad = sf.Presheaf(site, dict(h.sections), broken)
        rep = sf.validate_presheaf(bad)
        assert not rep.passed
        assert any(f.condition == "contravariance" for f in rep.findings)


def test_validate_rejects_dangling(two_object_site):
    with pytest.raises(sf.InputError):
        sf.validate_presheaf(
            sf.Presheaf(
                two_object_site,
                {"T": ("a",), "P": ()},
                {"p": {"a": "ghost"}, "s": {}},
            )
        )


# -- sheaf criteria -----------------------------------------------------------------


def test_constant_two_point_is_sheaf(two_object_site):
    f = sf.constant_presheaf(two_object_site, ("x", "y"))
    assert sf.is_sheaf(f, "equalizer") == (True, None)
    assert sf.is_sheaf(f, "galois") == (True, None)


def test_glue_failure_detected(glue_failure):
    ok, wit = sf.is_sheaf(glue_failure, "equalizer")
    assert not ok and wit == ("p", "a", "b")
    ok2, wit2 = sf.is_sheaf(glue_failure, "galois")
    assert not ok2 and wit2 == ("p", "a", "b")


def test_representables_are_sheaves(two_object_site, s3_gsets):
    for site in (two_object_site, s3_gsets[0]):
        for x in site.category.objects:
            h = sf.representable(site, x)
            assert sf.is_sheaf(h, "equalizer")[0]
            assert sf.is_sheaf(h, "galois")[0]


def test_modes_agree_on_small_presheaves(two_object_site):
    for f in sf.enumerate_presheaves(two_object_site, 2):
        assert sf.is_sheaf(f, "equalizer")[0] == sf.is_sheaf(f, "galois")[0]


def test_unknown_mode_rejected(two_object_site):
    with pytest.raises(sf.InputError):
        sf.is_sheaf(sf.constant_presheaf(two_object_site, ()), "synthetic")


# -- sheafification --------------------------------------------------------------------


def test_sheafify_sheaf_is_isomorphism(two_object_site):
    f = sf.constant_presheaf(two_object_site, ("x", "y"))
    aF, unit = sf.sheafify(f)
    assert unit.is_bijective()
    assert not unit.validate()


def test_sheafify_glue_failure(glue_failure, two_object_site):
    aF, unit = sf.sheafify(glue_failure)
    assert len(aF.at("T")) == 2
    assert len(aF.at("P")) == 2
    assert sf.is_sheaf(aF, "equalizer")[0] and sf.is_sheaf(aF, "galois")[0]
    # both sections over T collapse to the same class
    comp = unit.components["T"]
    assert comp["a"] == comp["b"]
    assert not unit.validate()


def test_sheafify_empty(two_object_site):
    f = sf.Presheaf(two_object_site, {"T": (), "P": ()}, {"p": {}, "s": {}})
    aF, unit = sf.sheafify(f)
    assert all(not aF.at(x) for x in two_object_site.category.objects)


def test_sheafify_requires_enough_coverings(idempotent_category):
    c = idempotent_category
    topo = sf.ATopology(c, sf.MorphismCollection.all_morphisms(c), check=False)
    site = sf.Site(category=c, topology=topo)
    f = sf.constant_presheaf(site, ("x",))
    with pytest.raises(sf.PreconditionError):
        sf.sheafify(f)


def test_sheafify_idempotent(two_object_site, glue_failure):
    aF, _ = sf.sheafify(glue_failure)
    a2, unit2 = sf.sheafify(aF)
    assert unit2.is_bijective()


# -- morphism enumeration -------------------------------------------------------------------


def test_yoneda_endomorphisms(two_object_site):
    hP = sf.representable(two_object_site, "P")
    assert len(sf.presheaf_hom(hP, hP)) == 2


def test_hom_to_terminal_is_singleton(two_object_site):
    f = sf.representable(two_object_site, "P")
    terminal = sf.constant_presheaf(two_object_site, ("*",))
    assert len(sf.presheaf_hom(f, terminal)) == 1


def test_hom_from_point_to_free(two_object_site):
    hT = sf.representable(two_object_site, "T")
    hP = sf.representable(two_object_site, "P")
    assert sf.presheaf_hom(hT, hP) == []


def test_yoneda_bijection_counts(two_object_site):
    presheaves = sf.enumerate_presheaves(two_object_site, 2)
    for x in two_object_site.category.objects:
        h = sf.representable(two_object_site, x)
        for f in presheaves[:25]:
            assert len(sf.presheaf_hom(h, f)) == len(f.at(x))


def test_hom_cap(two_object_site):
    big = sf.constant_presheaf(two_object_site, tuple(f"v{i}" for i in range(8)))
    with pytest.raises(sf.ResourceLimitError):
        sf.presheaf_hom(big, big, cap=10)


def test_presheaves_isomorphic_detects_relabeling(two_object_site):
    f = sf.Presheaf(
        two_object_site,
        {"T": ("a",), "P": ("0", "1")},
        {"p": {"a": "0"}, "s": {"0": "0", "1": "1"}},
    )
    g = sf.Presheaf(
        two_object_site,
        {"T": ("w",), "P": ("x", "y")},
        {"p": {"w": "y"}, "s": {"x": "x", "y": "y"}},
    )
    assert sf.presheaves_isomorphic(f, g) is not None
    h = sf.Presheaf(  # different flip action
        two_object_site,
        {"T": ("w",), "P": ("x", "y")},
        {"p": {"w": "y"}, "s": {"x": "y", "y": "x"}},
    )
    assert sf.presheaves_isomorphic(f, h) is None


# -- exhaustive generation ------------------------------------------------------------------


def _independent_presheaf_count(site, bound):
    """Count presheaves directly from flip-action combinatorics."""
    total = 0
    for n_t in range(bound + 1):
        for n_p in range(bound + 1):
            for invol in itertools.product(range(n_p), repeat=n_p):
                if any(invol[invol[i]] != i for i in range(n_p)):
                    continue
                fixed = sum(1 for i in range(n_p) if invol[i] == i)
                total += fixed**n_t if n_t else 1
    return total


def test_enumerate_presheaves_count(two_object_site):
    got = sf.enumerate_presheaves(two_object_site, 3)
    assert len(got) == _independent_presheaf_count(two_object_site, 3) == 73
    for f in got[:40]:
        assert sf.validate_presheaf(f).clean


def test_enumerate_sheaves_flip_site(two_object_site):
    got = sf.enumerate_sheaves(two_object_site, 3)
    # flip actions on <= 3 points up to isomorphism with <= 3 invariants
    assert len(got) == 6
    for f in got:
        assert sf.is_sheaf(f, "equalizer")[0]
    # pairwise non-isomorphic
    for i, f in enumerate(got):
        for g in got[i + 1 :]:
            assert sf.presheaves_isomorphic(f, g) is None


# -- limits and colimits -----------------------------------------------------------------------


def test_product_coproduct_equalizer_shapes(two_object_site):
    f = sf.representable(two_object_site, "P")
    g = sf.constant_presheaf(two_object_site, ("u", "v"))
    prod = sf.presheaf_product(f, g)
    assert len(prod.at("P")) == len(f.at("P")) * len(g.at("P"))
    assert sf.validate_presheaf(prod).clean
    cop = sf.presheaf_coproduct(f, g)
    assert len(cop.at("P")) == len(f.at("P")) + len(g.at("P"))
    assert sf.validate_presheaf(cop).clean
    homs = sf.presheaf_hom(f, f)
    eq = sf.presheaf_equalizer(homs[0], homs[-1])
    assert sf.validate_presheaf(eq).clean
