"""Presheaves on finite sites, sheaf criteria, and explicit sheafification.

A presheaf stores a finite section set per object and one restriction map
per non-identity morphism; ``restrict(f)`` for ``f: X -> Y`` maps sections
over Y to sections over X.  Sheafification is computed objectwise as a
filtered colimit of deck-invariant sections over the covering category of
Galois coverings, realized by union-find over a disjoint sum.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import InputError, InvariantViolation, PreconditionError, ResourceLimitError
from .galois import aut_over, enough_galois_coverings, hom_over, is_galois_covering
from .report import ValidationReport
from .util import UnionFind
from .validation import Site


@dataclass
class Presheaf:
    """Finite sets of sections with contravariant restriction maps."""

    site: Site
    sections: dict[str, tuple[str, ...]]
    restrictions: dict[str, dict[str, str]]

    def __post_init__(self):
        self.sections = {x: tuple(v) for x, v in self.sections.items()}

    def at(self, x: str) -> tuple[str, ...]:
        return self.sections.get(x, ())

    def restriction_map(self, f: str) -> dict[str, str]:
        c = self.site.category
        if c.is_identity(f):
            return {s: s for s in self.at(c.src(f))}
        return self.restrictions[f]

    def restrict(self, f: str, s: str) -> str:
        return self.restriction_map(f)[s]

    def total_sections(self) -> int:
        return sum(len(v) for v in self.sections.values())

    def to_json(self) -> dict:
        return {
            "sections": {x: list(v) for x, v in sorted(self.sections.items())},
            "restrictions": {
                f: dict(sorted(m.items()))
                for f, m in sorted(self.restrictions.items())
            },
        }


@dataclass
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: dict[str, dict[str, str]]

    def component(self, x: str) -> dict[str, str]:
        return self.components.get(x, {})

    def validate(self) -> list[str]:
        bad = []
        c = self.source.site.category
        for x in c.objects:
            comp = self.components.get(x, {})
            if set(comp) != set(self.source.at(x)):
                bad.append(f"component at {x} has wrong domain")
                continue
            if not set(comp.values()) <= set(self.target.at(x)):
                bad.append(f"component at {x} has wrong codomain")
        for f in c.morphisms:
            if c.is_identity(f):
                continue
            x, y = c.src(f), c.dst(f)
            for s in self.source.at(y):
                lhs = self.components[x][self.source.restrict(f, s)]
                rhs = self.target.restrict(f, self.components[y][s])
                if lhs != rhs:
                    bad.append(f"naturality fails at ({f},{s})")
        return bad

    def is_bijective(self) -> bool:
        for x in self.source.site.category.objects:
            comp = self.component(x)
            if len(set(comp.values())) != len(comp) or len(comp) != len(
                self.target.at(x)
            ):
                return False
        return True


def representable(s: Site, x: str) -> Presheaf:
    """Sections over Y are the morphisms Y -> x; restriction precomposes."""
    c = s.category
    if x not in c.objects:
        raise InputError(f"unknown object {x}")
    sections = {y: tuple(sorted(c.hom(y, x))) for y in c.objects}
    restrictions = {}
    for f in c.morphisms:
        if c.is_identity(f):
            continue
        a, b = c.src(f), c.dst(f)
        restrictions[f] = {s: c.compose(s, f) for s in sections[b]}
    return Presheaf(s, sections, restrictions)


def constant_presheaf(s: Site, values) -> Presheaf:
    values = tuple(values)
    sections = {x: values for x in s.category.objects}
    restrictions = {
        f: {v: v for v in values}
        for f in s.category.morphisms
        if not s.category.is_identity(f)
    }
    return Presheaf(s, sections, restrictions)


def validate_presheaf(f: Presheaf) -> ValidationReport:
    """List every functoriality violation; dangling data is an input error."""
    c = f.site.category
    rep = ValidationReport(level="presheaf")
    for x in f.sections:
        if x not in set(c.objects):
            raise InputError(f"sections listed for unknown object {x}")
    for m in c.morphisms:
        if c.is_identity(m):
            continue
        if m not in f.restrictions:
            raise InputError(f"no restriction map along {m}")
        x, y = c.src(m), c.dst(m)
        table = f.restrictions[m]
        if set(table) != set(f.at(y)) or not set(table.values()) <= set(f.at(x)):
            raise InputError(f"restriction along {m} has dangling element ids")
    for g, m in c.composable_pairs():
        gm = c.compose(g, m)
        for s in f.at(c.dst(g)):
            lhs = f.restrict(gm, s)
            rhs = f.restrict(m, f.restrict(g, s))
            if lhs != rhs:
                rep.add(
                    "contravariance",
                    (m, g, s),
                    f"restriction of {s} along {gm} disagrees with the two-step path",
                )
                break
    return rep


# -- sheaf criteria ---------------------------------------------------------


def fiber_product_pairs(s: Site, f: str, z: str) -> list[tuple[str, str]]:
    """Sections over z of the fiber product of the representable of src(f)
    with itself over the representable of dst(f)."""
    c = s.category
    y = c.src(f)
    out = []
    for a in c.hom(z, y):
        for b in c.hom(z, y):
            if c.compose(f, a) == c.compose(f, b):
                out.append((a, b))
    return out


def _equalizer_sections(fp: Presheaf, f: str) -> list[str]:
    c = fp.site.category
    y = c.src(f)
    out = []
    for s in fp.at(y):
        good = True
        for z in c.objects:
            for a, b in fiber_product_pairs(fp.site, f, z):
                if fp.restrict(a, s) != fp.restrict(b, s):
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(s)
    return out


def is_sheaf(f: Presheaf, mode: str = "equalizer") -> tuple[bool, tuple | None]:
    """Test the gluing condition along every covering morphism.

    equalizer mode runs over the basis morphisms and compares the image of
    the restriction with the equalizer of the two fiber-product pullbacks;
    galois mode runs over the Galois coverings in the covering collection
    and compares with the deck-invariant sections.  The two agree whenever
    the site has enough Galois coverings.
    """
    s = f.site
    c = s.category
    if mode == "equalizer":
        covers = sorted(s.topology.basis.members)
    elif mode == "galois":
        ok, _ = enough_galois_coverings(c, s.topology.basis)
        if not ok:
            raise PreconditionError("galois mode needs enough Galois coverings")
        covers = [
            m
            for m in sorted(s.covering_members())
            if is_galois_covering(c, m) is not None
        ]
    else:
        raise InputError(f"unknown sheaf criterion mode {mode!r}")

    for m in covers:
        x, y = c.dst(m), c.src(m)
        table = f.restriction_map(m)
        seen: dict[str, str] = {}
        for sec in f.at(x):
            img = table[sec]
            if img in seen:
                return False, (m, seen[img], sec)
            seen[img] = sec
        image = set(seen)
        if mode == "equalizer":
            glue = set(_equalizer_sections(f, m))
        else:
            deck = aut_over(c, m)
            glue = {
                sec
                for sec in f.at(y)
                if all(f.restrict(a, sec) == sec for a in deck.elements if not c.is_identity(a))
            }
        if image != glue:
            extra = sorted(glue.symmetric_difference(image))
            return False, (m, extra[0])
    return True, None


# -- sheafification -----------------------------------------------------------


def _covering_category_objects(s: Site, x: str) -> list[str]:
    """Galois coverings of x inside the covering collection (incl. identity)."""
    c = s.category
    tj = s.covering_members()
    return sorted(
        m for m in c.into(x) if m in tj and is_galois_covering(c, m) is not None
    )


def _invariant_sections(f: Presheaf, m: str) -> list[str]:
    c = f.site.category
    deck = aut_over(c, m)
    return [
        sec
        for sec in f.at(c.src(m))
        if all(
            f.restrict(a, sec) == sec
            for a in deck.elements
            if not c.is_identity(a)
        )
    ]


class _ColimitAtObject:
    """The filtered colimit of deck-invariant sections over the covering
    category at one object, with class bookkeeping."""

    def __init__(self, f: Presheaf, x: str):
        self.presheaf = f
        self.x = x
        c = f.site.category
        self.covers = _covering_category_objects(f.site, x)
        self.invariants = {m: _invariant_sections(f, m) for m in self.covers}
        uf = UnionFind()
        for m in self.covers:
            for sec in self.invariants[m]:
                uf.add((m, sec))
        for m1 in self.covers:
            for m2 in self.covers:
                for h in hom_over(c, m1, m2):
                    for sec in self.invariants[m2]:
                        uf.add((m1, f.restrict(h, sec)))
                        uf.union((m2, sec), (m1, f.restrict(h, sec)))
        self.uf = uf
        tag = lambda node: f"{node[0]}|{node[1]}"
        reps: dict = {}
        for node in uf.parent:
            root = uf.find(node)
            cur = reps.get(root)
            if cur is None or tag(node) < tag(cur):
                reps[root] = node
        self.class_of = {
            node: f"class:{tag(reps[uf.find(node)])}" for node in uf.parent
        }
        self.classes = tuple(sorted(set(self.class_of.values())))


def sheafify(f: Presheaf) -> tuple[Presheaf, PresheafMorphism]:
    """The associated sheaf and the comparison morphism into it.

    Sections over X are colimit classes of deck-invariant sections over the
    Galois coverings of X; restriction along u: X -> X' transports a class
    through a covering of X whose composite with u is again a covering.
    """
    s = f.site
    c = s.category
    ok, _ = enough_galois_coverings(c, s.topology.basis)
    if not ok:
        raise PreconditionError("sheafification needs enough Galois coverings")
    tj = s.covering_members()

    colim = {x: _ColimitAtObject(f, x) for x in c.objects}
    sections = {x: colim[x].classes for x in c.objects}

    restrictions: dict[str, dict[str, str]] = {}
    for u in c.morphisms:
        if c.is_identity(u):
            continue
        x, x1 = c.src(u), c.dst(u)
        src_col, dst_col = colim[x], colim[x1]
        table = {}
        for cls in dst_col.classes:
            node = min(
                (n for n, k in dst_col.class_of.items() if k == cls),
                key=lambda n: f"{n[0]}|{n[1]}",
            )
            table[cls] = _transport_class(f, u, node, src_col, tj)
        restrictions[u] = table

    out = Presheaf(s, sections, restrictions)
    unit_components = {}
    for x in c.objects:
        idm = c.identity[x]
        unit_components[x] = {
            sec: colim[x].class_of[(idm, sec)] for sec in f.at(x)
        }
    unit = PresheafMorphism(source=f, target=out, components=unit_components)
    return out, unit


def _transport_class(f: Presheaf, u: str, node, src_col: "_ColimitAtObject", tj):
    """Image of a colimit class under restriction along u: X -> X'.

    node = (m1, sec) is a covering of X' with an invariant section.  Pick a
    covering h of X with u∘h again a covering, and a comparison morphism w
    from u∘h to m1 over X'; push sec along w into the colimit at X.
    """
    c = f.site.category
    m1, sec = node
    for h in src_col.covers:
        uh = c.compose(u, h)
        if not (uh in tj and is_galois_covering(c, uh) is not None):
            continue
        for w in hom_over(c, uh, m1):
            pushed = f.restrict(w, sec)
            key = (h, pushed)
            if key not in src_col.class_of:
                raise InvariantViolation(
                    f"transported section left the invariant part at {h}"
                )
            return src_col.class_of[key]
    raise InvariantViolation(
        f"no covering of {c.src(u)} refines {m1} through {u}; "
        "covering category not cofinal"
    )


# -- morphism enumeration ------------------------------------------------------


def presheaf_hom(
    f: Presheaf, g: Presheaf, cap: int = 10**6
) -> list[PresheafMorphism]:
    """Every natural transformation f -> g, by ordered search with pruning.

    The cap bounds the number of explored partial assignments, not the raw
    product space, which naturality pruning usually shrinks by orders of
    magnitude.
    """
    if f.site is not g.site and f.site.category is not g.site.category:
        raise InputError("presheaves live on different sites")
    c = f.site.category
    objs = list(c.objects)
    for x in objs:
        if f.at(x) and not g.at(x):
            return []

    explored = 0
    results: list[PresheafMorphism] = []
    assignment: dict[str, dict[str, str]] = {}

    def consistent(x: str) -> bool:
        for m in c.morphisms:
            if c.is_identity(m):
                continue
            a, b = c.src(m), c.dst(m)
            if a not in assignment or b not in assignment:
                continue
            for sec in f.at(b):
                if assignment[a][f.restrict(m, sec)] != g.restrict(
                    m, assignment[b][sec]
                ):
                    return False
        return True

    def search(i: int):
        nonlocal explored
        if i == len(objs):
            results.append(
                PresheafMorphism(f, g, {x: dict(m) for x, m in assignment.items()})
            )
            return
        x = objs[i]
        dom, cod = f.at(x), g.at(x)
        if not dom:
            assignment[x] = {}
            if consistent(x):
                search(i + 1)
            del assignment[x]
            return
        for images in itertools.product(cod, repeat=len(dom)):
            explored += 1
            if explored > cap:
                raise ResourceLimitError(
                    f"natural-transformation search exceeded the cap {cap}"
                )
            assignment[x] = dict(zip(dom, images))
            if consistent(x):
                search(i + 1)
            del assignment[x]

    search(0)
    return results


def presheaves_isomorphic(f: Presheaf, g: Presheaf) -> PresheafMorphism | None:
    """A natural isomorphism f -> g found by bijection search, or None."""
    c = f.site.category
    objs = list(c.objects)
    if any(len(f.at(x)) != len(g.at(x)) for x in objs):
        return None
    assignment: dict[str, dict[str, str]] = {}

    def consistent() -> bool:
        for m in c.morphisms:
            if c.is_identity(m):
                continue
            a, b = c.src(m), c.dst(m)
            if a not in assignment or b not in assignment:
                continue
            for sec in f.at(b):
                if assignment[a][f.restrict(m, sec)] != g.restrict(
                    m, assignment[b][sec]
                ):
                    return False
        return True

    def search(i: int):
        if i == len(objs):
            return PresheafMorphism(
                f, g, {x: dict(t) for x, t in assignment.items()}
            )
        x = objs[i]
        dom = f.at(x)
        for perm in itertools.permutations(g.at(x), len(dom)):
            assignment[x] = dict(zip(dom, perm))
            if consistent():
                found = search(i + 1)
                if found is not None:
                    return found
            del assignment[x]
        return None

    return search(0)


# -- limits and colimits (sectionwise) ----------------------------------------


def presheaf_product(f: Presheaf, g: Presheaf) -> Presheaf:
    c = f.site.category
    sections = {
        x: tuple(f"({a},{b})" for a in f.at(x) for b in g.at(x)) for x in c.objects
    }
    restrictions = {}
    for m in c.morphisms:
        if c.is_identity(m):
            continue
        x, y = c.src(m), c.dst(m)
        restrictions[m] = {
            f"({a},{b})": f"({f.restrict(m, a)},{g.restrict(m, b)})"
            for a in f.at(y)
            for b in g.at(y)
        }
    return Presheaf(f.site, sections, restrictions)


def presheaf_coproduct(f: Presheaf, g: Presheaf) -> Presheaf:
    c = f.site.category
    sections = {
        x: tuple(f"L:{a}" for a in f.at(x)) + tuple(f"R:{b}" for b in g.at(x))
        for x in c.objects
    }
    restrictions = {}
    for m in c.morphisms:
        if c.is_identity(m):
            continue
        y = c.dst(m)
        table = {f"L:{a}": f"L:{f.restrict(m, a)}" for a in f.at(y)}
        table.update({f"R:{b}": f"R:{g.restrict(m, b)}" for b in g.at(y)})
        restrictions[m] = table
    return Presheaf(f.site, sections, restrictions)


def presheaf_equalizer(p1: PresheafMorphism, p2: PresheafMorphism) -> Presheaf:
    """The subpresheaf where two parallel morphisms agree."""
    f = p1.source
    c = f.site.category
    sections = {
        x: tuple(
            s for s in f.at(x) if p1.component(x)[s] == p2.component(x)[s]
        )
        for x in c.objects
    }
    restrictions = {}
    for m in c.morphisms:
        if c.is_identity(m):
            continue
        y = c.dst(m)
        restrictions[m] = {s: f.restrict(m, s) for s in sections[y]}
    return Presheaf(f.site, sections, restrictions)


# -- exhaustive generation ------------------------------------------------------


def category_generators(c) -> tuple[list[str], dict[str, tuple[str, str]]]:
    """A greedy generating set of non-identity morphisms plus, for every
    derived morphism, one factorization through earlier material."""
    parents: dict[str, tuple[str, str]] = {}

    def closure(gens: list[str]) -> set[str]:
        span = set(c.identity.values()) | set(gens)
        parents.clear()
        changed = True
        while changed:
            changed = False
            for f in sorted(span):
                for g in sorted(span):
                    if c.dst(f) != c.src(g):
                        continue
                    h = c.compose(g, f)
                    if h not in span:
                        span.add(h)
                        parents[h] = (g, f)
                        changed = True
        return span

    gens: list[str] = []
    span = closure(gens)
    while len(span) < len(c.morphisms):
        gens.append(min(set(c.morphisms) - span))
        span = closure(gens)
    return gens, dict(parents)


def _derive_restrictions(
    c,
    sections: dict[str, tuple[str, ...]],
    gens_maps: dict[str, dict[str, str]],
    parents: dict[str, tuple[str, str]],
) -> dict[str, dict[str, str]] | None:
    """Extend generator restriction maps to all morphisms; None on a
    functoriality conflict."""
    maps = dict(gens_maps)

    def table(f: str) -> dict[str, str]:
        if c.is_identity(f):
            return {s: s for s in sections[c.src(f)]}
        if f in maps:
            return maps[f]
        g, h = parents[f]  # f = g∘h, so R(f) = R(h)∘R(g)
        tg, th = table(g), table(h)
        maps[f] = {s: th[tg[s]] for s in tg}
        return maps[f]

    for f in c.morphisms:
        if not c.is_identity(f) and f not in maps and f not in parents:
            return None
    for f in c.morphisms:
        if not c.is_identity(f):
            table(f)
    for g, f in c.composable_pairs():
        h = c.compose(g, f)
        tg, tf, th = table(g), table(f), table(h)
        for sec in tg:
            if tf[tg[sec]] != th[sec]:
                return None
    return {f: maps[f] for f in c.morphisms if not c.is_identity(f)}


def _section_labels(n: int) -> tuple[str, ...]:
    return tuple(f"e{i}" for i in range(n))


def enumerate_presheaves(s: Site, bound: int) -> list[Presheaf]:
    """Every presheaf with at most ``bound`` sections per object, over
    canonical section labels."""
    c = s.category
    gens, parents = category_generators(c)
    out: list[Presheaf] = []
    objs = list(c.objects)
    for sizes in itertools.product(range(bound + 1), repeat=len(objs)):
        sections = {x: _section_labels(n) for x, n in zip(objs, sizes)}
        for presheaf in _fill_restrictions(s, sections, gens, parents, sheafish=False):
            out.append(presheaf)
    return out


def enumerate_sheaves(s: Site, bound: int) -> list[Presheaf]:
    """Sheaves with at most ``bound`` sections per object, up to
    isomorphism of presheaves."""
    c = s.category
    gens, parents = category_generators(c)
    out: list[Presheaf] = []
    objs = list(c.objects)
    for sizes in itertools.product(range(bound + 1), repeat=len(objs)):
        sections = {x: _section_labels(n) for x, n in zip(objs, sizes)}
        for cand in _fill_restrictions(s, sections, gens, parents, sheafish=True):
            ok, _ = is_sheaf(cand, mode="equalizer")
            if not ok:
                continue
            if any(presheaves_isomorphic(cand, prev) for prev in out):
                continue
            out.append(cand)
    return out


def _fill_restrictions(s, sections, gens, parents, sheafish: bool):
    """DFS over generator restriction maps with functoriality at the leaf.

    With ``sheafish`` set, generator maps along isomorphisms are bijections
    and maps along Galois covering generators with derivable deck maps are
    bijections onto the deck-invariant sections; this prunes without losing
    any sheaf.
    """
    from .galois import aut_over, is_galois_covering

    c = s.category
    tj = s.covering_members()
    order = sorted(gens, key=lambda f: (0 if c.src(f) == c.dst(f) else 1, f))
    assigned: dict[str, dict[str, str]] = {}

    def candidate_maps(f: str):
        dom = sections[c.dst(f)]
        cod = sections[c.src(f)]
        if sheafish and c.is_iso(f):
            if len(dom) != len(cod):
                return
            for perm in itertools.permutations(cod, len(dom)):
                yield dict(zip(dom, perm))
            return
        if sheafish and f in tj and is_galois_covering(c, f) is not None:
            deck = [a for a in aut_over(c, f).elements if not c.is_identity(a)]
            deck_maps = _try_derive(c, assigned, parents, deck, sections)
            if deck_maps is not None:
                fixed = [
                    sec
                    for sec in cod
                    if all(deck_maps[a][sec] == sec for a in deck)
                ]
                if len(dom) != len(fixed):
                    return
                for perm in itertools.permutations(fixed, len(dom)):
                    yield dict(zip(dom, perm))
                return
        for combo in itertools.product(cod, repeat=len(dom)):
            yield dict(zip(dom, combo))

    def search(i: int):
        if i == len(order):
            full = _derive_restrictions(c, sections, assigned, parents)
            if full is None:
                return
            cand = Presheaf(s, dict(sections), full)
            if validate_presheaf(cand).clean:
                yield cand
            return
        f = order[i]
        dom = sections[c.dst(f)]
        if not dom:
            assigned[f] = {}
            yield from search(i + 1)
            del assigned[f]
            return
        for table in candidate_maps(f):
            assigned[f] = table
            yield from search(i + 1)
            del assigned[f]

    yield from search(0)


def _try_derive(c, assigned, parents, wanted, sections):
    """Derive maps for the wanted morphisms from assigned generators only."""
    maps = dict(assigned)

    def table(f: str):
        if c.is_identity(f):
            return {sec: sec for sec in sections[c.src(f)]}
        if f in maps:
            return maps[f]
        if f not in parents:
            return None
        g, h = parents[f]
        tg, th = table(g), table(h)
        if tg is None or th is None:
            return None
        maps[f] = {sec: th[tg[sec]] for sec in tg}
        return maps[f]

    out = {}
    for f in wanted:
        t = table(f)
        if t is None:
            return None
        out[f] = t
    return out
