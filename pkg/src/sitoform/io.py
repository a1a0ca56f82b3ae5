"""Versioned JSON document formats and DOT emission.

All documents carry ``"schema": "sitoform/1"``.  Categories store
identities implicitly under the reserved ids ``id:<object>``; composition
triples are stored ``[f, g, h]`` with h = g after f.
"""
from __future__ import annotations

import hashlib
import json

from .cat import FiniteCategory, CatFunctor, Mor, identity_name
from .errors import InputError
from .galois import GroupTable
from .grid import Grid
from .sheaves import Presheaf
from .topology import ATopology, MorphismCollection
from .validation import Site, Window

SCHEMA = "sitoform/1"


def canonical_dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def inputs_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_dumps(doc).encode()).hexdigest()


# -- categories -----------------------------------------------------------------


def category_to_json(c: FiniteCategory) -> dict:
    return c.to_json()


def category_from_json(doc: dict) -> FiniteCategory:
    try:
        objects = list(doc["objects"])
        mor_entries = doc["morphisms"]
        triples = doc["composition"]
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed category document: {e}") from None
    mors = [Mor(identity_name(x), x, x) for x in objects]
    mors += [Mor(m["id"], m["src"], m["dst"]) for m in mor_entries]
    identity = {x: identity_name(x) for x in objects}
    comp: dict[tuple[str, str], str] = {}
    by_name = {m.name: m for m in mors}
    for f, g, h in triples:
        comp[(g, f)] = h
    for m in mors:
        comp[(identity[m.dst], m.name)] = m.name
        comp[(m.name, identity[m.src])] = m.name
    missing = [
        (g.name, f.name)
        for f in mors
        for g in mors
        if f.dst == g.src and (g.name, f.name) not in comp
    ]
    if missing:
        raise InputError(f"composition table lacks entries for {missing[:3]}")
    return FiniteCategory(objects, mors, identity, comp)


# -- collections ------------------------------------------------------------------


def collection_to_json(t: MorphismCollection) -> dict:
    c = t.category
    if t.members == frozenset(c.morphisms):
        return {"collection": "all"}
    if t.members == frozenset(c.identity.values()):
        return {"collection": "identities"}
    return {"collection": sorted(t.members)}


def collection_from_json(doc: dict, c: FiniteCategory) -> MorphismCollection:
    spec = doc.get("collection")
    if spec == "all":
        return MorphismCollection.all_morphisms(c)
    if spec == "identities":
        return MorphismCollection.identities(c)
    if isinstance(spec, list):
        return MorphismCollection(c, frozenset(spec))
    raise InputError("collection must be 'all', 'identities', or a list")


# -- groups -----------------------------------------------------------------------


def group_to_json(g: GroupTable) -> dict:
    return g.to_json()


def group_from_json(doc: dict) -> GroupTable:
    els = list(doc["elements"])
    mul = {
        (els[i], els[j]): doc["mul"][i][j]
        for i in range(len(els))
        for j in range(len(els))
    }
    return GroupTable.build(els, mul, doc["unit"])


# -- presheaves ---------------------------------------------------------------------


def presheaf_to_json(f: Presheaf) -> dict:
    return f.to_json()


def presheaf_from_json(doc: dict, s: Site) -> Presheaf:
    return Presheaf(
        s,
        {x: tuple(v) for x, v in doc["sections"].items()},
        {f: dict(t) for f, t in doc.get("restrictions", {}).items()},
    )


# -- grids -------------------------------------------------------------------------


def grid_to_json(g: Grid) -> dict:
    return {
        "poset": category_to_json(g.poset),
        "iota": {
            "obj_map": dict(sorted(g.iota.obj_map.items())),
            "mor_map": dict(sorted(g.iota.mor_map.items())),
        },
    }


def grid_from_json(doc: dict, c: FiniteCategory) -> Grid:
    poset = category_from_json(doc["poset"])
    iota = CatFunctor(
        source=poset,
        target=c,
        obj_map=dict(doc["iota"]["obj_map"]),
        mor_map=dict(doc["iota"]["mor_map"]),
    )
    bad = iota.validate()
    if bad:
        raise InputError(f"grid structure functor invalid: {bad[0]}")
    return Grid(poset=poset, iota=iota)


# -- site documents -------------------------------------------------------------------


def site_to_json(s: Site, grid: Grid | None = None, presheaves=None) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "site",
        "name": s.name,
        "category": category_to_json(s.category),
        "basis": collection_to_json(s.topology.basis),
        "basis_checked": s.topology.check,
    }
    if s.window is not None:
        doc["window"] = s.window.to_json()
    if grid is not None:
        doc["grid"] = grid_to_json(grid)
    if presheaves:
        doc["presheaves"] = {name: presheaf_to_json(p) for name, p in presheaves.items()}
    return doc


def site_from_json(doc: dict) -> tuple[Site, Grid | None, dict[str, Presheaf]]:
    if doc.get("schema") != SCHEMA:
        raise InputError(f"unsupported schema {doc.get('schema')!r}")
    if doc.get("kind") not in (None, "site"):
        raise InputError(f"expected a site document, got kind {doc.get('kind')!r}")
    cat = category_from_json(doc["category"])
    basis = collection_from_json(doc["basis"], cat)
    window = None
    if doc.get("window"):
        w = doc["window"]
        window = Window(rank={k: int(v) for k, v in w["rank"].items()}, lo=w["lo"], hi=w["hi"])
    topo = ATopology(cat, basis, check=bool(doc.get("basis_checked", window is None)))
    site = Site(category=cat, topology=topo, window=window, name=doc.get("name", "site"))
    grid = grid_from_json(doc["grid"], cat) if doc.get("grid") else None
    presheaves = {
        name: presheaf_from_json(p, site)
        for name, p in doc.get("presheaves", {}).items()
    }
    return site, grid, presheaves


# -- report documents -----------------------------------------------------------------


def report_document(command: str, input_doc: dict | None, passed: bool, **payload) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "report",
        "command": command,
        "inputs_hash": inputs_hash(input_doc) if input_doc is not None else None,
        "pass": bool(passed),
    }
    doc.update(payload)
    return doc


# -- DOT ---------------------------------------------------------------------------------


def _dot_escape(s: str) -> str:
    return s.replace('"', '\\"')


def category_to_dot(c: FiniteCategory, name: str = "category") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{']
    for x in c.objects:
        lines.append(f'  "{_dot_escape(x)}";')
    for f in c.morphisms:
        if c.is_identity(f):
            continue
        lines.append(
            f'  "{_dot_escape(c.src(f))}" -> "{_dot_escape(c.dst(f))}"'
            f' [label="{_dot_escape(f)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def grid_to_dot(g: Grid, name: str = "grid") -> str:
    p = g.poset
    lines = [f'digraph "{_dot_escape(name)}" {{']
    for x in p.objects:
        lines.append(
            f'  "{_dot_escape(x)}" [label="{_dot_escape(x)}\\n{_dot_escape(g.obj(x))}"];'
        )
    for f in p.morphisms:
        if not p.is_identity(f):
            lines.append(f'  "{_dot_escape(p.src(f))}" -> "{_dot_escape(p.dst(f))}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
