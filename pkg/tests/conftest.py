"""Shared fixtures: small hand-built categories and sites."""
import pytest

import sitoform as sf
from sitoform.cat import FiniteCategory, Mor


@pytest.fixture(scope="session")
def two_object_cover():
    """Objects P, T; a flip s on P and a projection p: P -> T with p∘s = p.

    Hand-built (not via the group-site builder) so the low-level tests do
    not depend on it.
    """
    objects = ["P", "T"]
    mors = [
        Mor("id:P", "P", "P"),
        Mor("id:T", "T", "T"),
        Mor("s", "P", "P"),
        Mor("p", "P", "T"),
    ]
    identity = {"P": "id:P", "T": "id:T"}
    comp = {
        ("s", "s"): "id:P",
        ("s", "id:P"): "s",
        ("id:P", "s"): "s",
        ("p", "s"): "p",
        ("p", "id:P"): "p",
        ("id:T", "p"): "p",
        ("id:P", "id:P"): "id:P",
        ("id:T", "id:T"): "id:T",
    }
    return FiniteCategory(objects, mors, identity, comp)


@pytest.fixture(scope="session")
def two_object_site(two_object_cover):
    topo = sf.ATopology(
        two_object_cover, sf.MorphismCollection.all_morphisms(two_object_cover)
    )
    return sf.Site(category=two_object_cover, topology=topo, name="two-object")


@pytest.fixture(scope="session")
def terminal_category():
    return FiniteCategory(
        ["*"], [Mor("id:*", "*", "*")], {"*": "id:*"}, {("id:*", "id:*"): "id:*"}
    )


@pytest.fixture(scope="session")
def terminal_site(terminal_category):
    topo = sf.ATopology(
        terminal_category, sf.MorphismCollection.all_morphisms(terminal_category)
    )
    return sf.Site(category=terminal_category, topology=topo, name="terminal")


@pytest.fixture(scope="session")
def cospan_category():
    """a -> c <- b with no way to complete the square."""
    objects = ["a", "b", "c"]
    mors = [
        Mor("id:a", "a", "a"),
        Mor("id:b", "b", "b"),
        Mor("id:c", "c", "c"),
        Mor("f", "a", "c"),
        Mor("g", "b", "c"),
    ]
    identity = {"a": "id:a", "b": "id:b", "c": "id:c"}
    comp = {}
    for m in mors:
        comp[(m.name, f"id:{m.src}")] = m.name
        comp[(f"id:{m.dst}", m.name)] = m.name
    return FiniteCategory(objects, mors, identity, comp)


@pytest.fixture(scope="session")
def parallel_pair_with_equalizer():
    """c -e-> a ⇉ b with f∘e = g∘e, so e is not an epimorphism."""
    objects = ["a", "b", "c"]
    mors = [
        Mor("id:a", "a", "a"),
        Mor("id:b", "b", "b"),
        Mor("id:c", "c", "c"),
        Mor("f", "a", "b"),
        Mor("g", "a", "b"),
        Mor("e", "c", "a"),
        Mor("fe", "c", "b"),
    ]
    identity = {"a": "id:a", "b": "id:b", "c": "id:c"}
    comp = {("f", "e"): "fe", ("g", "e"): "fe"}
    for m in mors:
        comp[(m.name, f"id:{m.src}")] = m.name
        comp[(f"id:{m.dst}", m.name)] = m.name
    return FiniteCategory(objects, mors, identity, comp)


@pytest.fixture(scope="session")
def discrete_two():
    objects = ["a", "b"]
    mors = [Mor("id:a", "a", "a"), Mor("id:b", "b", "b")]
    identity = {"a": "id:a", "b": "id:b"}
    comp = {("id:a", "id:a"): "id:a", ("id:b", "id:b"): "id:b"}
    return FiniteCategory(objects, mors, identity, comp)


@pytest.fixture(scope="session")
def idempotent_category():
    """u with a non-split idempotent e and a collapse q: u -> v.

    q is not a Galois covering (two morphisms land on one), and no
    refinement fixes it, so the full collection lacks enough coverings.
    """
    objects = ["u", "v"]
    mors = [
        Mor("id:u", "u", "u"),
        Mor("id:v", "v", "v"),
        Mor("e", "u", "u"),
        Mor("q", "u", "v"),
    ]
    identity = {"u": "id:u", "v": "id:v"}
    comp = {("e", "e"): "e", ("q", "e"): "q"}
    for m in mors:
        comp[(m.name, f"id:{m.src}")] = m.name
        comp[(f"id:{m.dst}", m.name)] = m.name
    return FiniteCategory(objects, mors, identity, comp)


@pytest.fixture(scope="session")
def z2_group():
    return sf.GroupTable.cyclic(2)


@pytest.fixture(scope="session")
def z2_gsets(z2_group):
    return sf.build_gsets_site(z2_group)


@pytest.fixture(scope="session")
def z4_gsets():
    return sf.build_gsets_site(sf.GroupTable.cyclic(4))


@pytest.fixture(scope="session")
def s3_gsets():
    return sf.build_gsets_site(sf.GroupTable.symmetric(3))


@pytest.fixture(scope="session")
def z2_monoid(z2_gsets):
    site, grid = z2_gsets
    return sf.compute_monoid(grid, site)


@pytest.fixture(scope="session")
def z4_monoid(z4_gsets):
    site, grid = z4_gsets
    return sf.compute_monoid(grid, site)


def gsets_object(site, n_elements):
    """The site object whose subgroup has the given size."""
    for o in site.category.objects:
        if o.count(",") == n_elements - 1:
            return o
    raise AssertionError(f"no object with subgroup size {n_elements}")
