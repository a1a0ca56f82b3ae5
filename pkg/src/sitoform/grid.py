"""Grids over a site: skeletal posets with a structure functor.

A grid plays the role of a separable closure for a site: a poset mapped
into the category so that covering morphisms lift along it and each
undercategory of the poset matches the undercategory of its image.  The
builders here realize the two-stage construction: a pregrid carved out of
the covering-wide subcategory under a deepest Galois covering, then the
grid as the poset skeleton of a full undercategory of the site.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cat import CatFunctor, FiniteCategory, Mor, identity_name, is_thin
from .errors import InputError, InvariantViolation, PreconditionError
from .galois import aut_over, hom_over, is_galois_covering
from .report import ValidationReport
from .validation import Site, validate_y_site


@dataclass
class Grid:
    """A thin skeletal poset with a functor into the site category."""

    poset: FiniteCategory
    iota: CatFunctor

    def obj(self, x: str) -> str:
        return self.iota.on_obj(x)

    def mor(self, f: str) -> str:
        return self.iota.on_mor(f)

    def under(self, x: str) -> list[str]:
        """Objects of the undercategory at x (thin: object level suffices)."""
        p = self.poset
        return [w for w in p.objects if p.hom(x, w)]

    def arrow(self, x: str, y: str) -> str | None:
        h = self.poset.hom(x, y)
        return h[0] if h else None


def galois_members(s: Site) -> frozenset[str]:
    """Covering morphisms of the site that are Galois coverings."""
    c = s.category
    tj = s.covering_members()
    return frozenset(f for f in tj if is_galois_covering(c, f) is not None)


def edge_objects(g: Grid, s: Site) -> frozenset[str]:
    """Poset objects all of whose incoming arrows map into the coverings."""
    tj = s.covering_members()
    p = g.poset
    out = set()
    for x in p.objects:
        if all(g.mor(f) in tj for f in p.into(x)):
            out.add(x)
    return frozenset(out)


def _check_poset_shape(g: Grid, rep: ValidationReport):
    p = g.poset
    thin, offender = is_thin(p)
    if not thin:
        rep.add("poset-thin", offender, f"hom set {offender} has several arrows")
        return
    for x, y in itertools.combinations(p.objects, 2):
        if p.hom(x, y) and p.hom(y, x):
            rep.add("poset-skeletal", (x, y), f"{x} and {y} are distinct isomorphic objects")
    for bad in g.iota.validate():
        rep.add("structure-functor", (), bad)


def validate_grid(g: Grid, s: Site) -> ValidationReport:
    """Exhaustively check the four grid conditions against the site."""
    rep = ValidationReport(level="grid")
    _check_poset_shape(g, rep)
    if not rep.passed:
        return rep
    p, c = g.poset, s.category
    tj = s.covering_members()

    # (1) connectivity of the poset
    for x, y in itertools.combinations(p.objects, 2):
        if not any(p.hom(z, x) and p.hom(z, y) for z in p.objects):
            rep.add("grid-1", (x, y), f"{x},{y} have no common lower bound")

    # (2) every site object is isomorphic to the image of an edge object
    edges = edge_objects(g, s)
    for z in c.objects:
        if not any(c.isos(g.obj(w), z) for w in edges):
            rep.add("grid-2", (z,), f"site object {z} misses every edge-object image")

    # (3) covering morphisms into an image lift to the poset
    for x in p.objects:
        ix = g.obj(x)
        for f in c.into(ix):
            if f not in tj:
                continue
            if _lift_of_covering(g, s, x, f) is None:
                rep.add("grid-3", (x, f), f"covering {f} into {ix} does not lift at {x}")

    # (4) each undercategory functor is an equivalence
    for x in p.objects:
        _check_under_equivalence(g, s, x, rep, covering_only=False)
    return rep


def _lift_of_covering(g: Grid, s: Site, x: str, f: str):
    """(f', alpha) with f': Y' -> x in the poset and iota(f')∘alpha = f."""
    c = s.category
    p = g.poset
    w = c.src(f)
    for y1 in p.objects:
        arrow = g.arrow(y1, x)
        if arrow is None:
            continue
        for alpha in c.isos(w, g.obj(y1)):
            if c.compose(g.mor(arrow), alpha) == f:
                return arrow, alpha
    return None


def _check_under_equivalence(
    g: Grid, s: Site, x: str, rep: ValidationReport, covering_only: bool
):
    """Fully faithful + essentially surjective for the undercategory at x.

    covering_only restricts the target to covering morphisms (the pregrid
    flavor of the condition); otherwise the full undercategory is used.
    """
    p, c = g.poset, s.category
    tj = s.covering_members()
    ix = g.obj(x)
    level = "pregrid-4" if covering_only else "grid-4"

    def admissible(f: str) -> bool:
        return (f in tj) if covering_only else True

    under = g.under(x)
    # fully faithful
    for w1, w2 in itertools.product(under, repeat=2):
        u1 = g.mor(g.arrow(x, w1))
        u2 = g.mor(g.arrow(x, w2))
        in_poset = bool(p.hom(w1, w2))
        in_site = any(
            admissible(h) and c.compose(h, u1) == u2
            for h in c.hom(g.obj(w1), g.obj(w2))
        )
        if in_poset != in_site:
            rep.add(
                level,
                (x, w1, w2),
                f"undercategory at {x}: arrow existence mismatch between {w1} and {w2}",
            )
    # essentially surjective
    for f in c.out_of(ix):
        if not admissible(f):
            continue
        z = c.dst(f)
        hit = False
        for w in under:
            u = g.mor(g.arrow(x, w))
            if any(c.compose(eps, u) == f for eps in c.isos(g.obj(w), z)):
                hit = True
                break
        if not hit:
            rep.add(level, (x, f), f"{f} out of {ix} misses the undercategory at {x}")


def validate_pregrid(pre: Grid, s: Site) -> ValidationReport:
    """Check the pregrid conditions relative to the covering-wide subcategory."""
    rep = ValidationReport(level="pregrid")
    _check_poset_shape(pre, rep)
    if not rep.passed:
        return rep
    p, c = pre.poset, s.category
    tj = s.covering_members()

    for f in p.morphisms:
        if pre.mor(f) not in tj:
            rep.add("pregrid-0", (f,), f"poset arrow {f} maps outside the coverings")

    for x, y in itertools.combinations(p.objects, 2):
        if not any(p.hom(z, x) and p.hom(z, y) for z in p.objects):
            rep.add("pregrid-1", (x, y), f"{x},{y} have no common lower bound")

    for z in c.objects:
        if not any(c.isos(pre.obj(w), z) for w in p.objects):
            rep.add("pregrid-2", (z,), f"site object {z} missed by the pregrid")

    for x in p.objects:
        ix = pre.obj(x)
        for f in c.into(ix):
            if f not in tj:
                continue
            if _lift_of_covering(pre, s, x, f) is None:
                rep.add("pregrid-3", (x, f), f"covering {f} into {ix} does not lift at {x}")

    for x in p.objects:
        _check_under_equivalence(pre, s, x, rep, covering_only=True)
    return rep


# -- construction -------------------------------------------------------------


def _skeleton_of_under(c: FiniteCategory, base: str, allowed: frozenset[str] | None):
    """Poset skeleton of the undercategory at a site object.

    Objects are representative morphisms out of ``base`` (least id per
    isomorphism-over-base class), with one arrow u1 -> u2 whenever some
    allowed mediating morphism h satisfies h∘u1 = u2.
    """
    outs = [
        f
        for f in c.out_of(base)
        if allowed is None or f in allowed
    ]
    rep_of: dict[str, str] = {}
    for u1 in outs:
        cls = [
            u2
            for u2 in outs
            if any(c.compose(h, u1) == u2 for h in c.isos(c.dst(u1), c.dst(u2)))
        ]
        rep_of[u1] = min(cls)
    reps = sorted(set(rep_of.values()))

    def mediates(u1: str, u2: str) -> str | None:
        for h in c.hom(c.dst(u1), c.dst(u2)):
            if allowed is not None and h not in allowed:
                continue
            if c.compose(h, u1) == u2:
                return h
        return None

    mors = []
    mediator: dict[str, str] = {}
    for u1, u2 in itertools.product(reps, repeat=2):
        if u1 == u2:
            continue
        h = mediates(u1, u2)
        if h is not None:
            name = f"le:{u1}>{u2}"
            mors.append(Mor(name, u1, u2))
            mediator[name] = h
    identity = {u: identity_name(u) for u in reps}
    all_mors = [Mor(identity[u], u, u) for u in reps] + mors
    by_pair = {(m.src, m.dst): m.name for m in all_mors}
    comp = {}
    for m1 in all_mors:
        for m2 in all_mors:
            if m1.dst == m2.src:
                comp[(m2.name, m1.name)] = by_pair[(m1.src, m2.dst)]
    poset = FiniteCategory(reps, all_mors, identity, comp)

    obj_map = {u: c.dst(u) for u in reps}
    mor_map = {identity[u]: c.identity[c.dst(u)] for u in reps}
    mor_map.update(mediator)
    return poset, obj_map, mor_map, rep_of


def build_pregrid(s: Site, x0: str) -> Grid:
    """Carve a pregrid out of the covering overcategory of x0.

    The construction fixes the deepest Galois covering of x0, picks the
    least tuple of comparison morphisms onto the overcategory
    representatives, and takes the poset skeleton of the morphisms under
    the covering that factor through a chosen comparison.
    """
    c = s.category
    if x0 not in c.objects:
        raise InputError(f"unknown object {x0}")
    yrep = validate_y_site(s)
    if not yrep.passed or yrep.unverified_only:
        raise PreconditionError("pregrid construction needs a verified Y-site")
    tj = s.covering_members()

    # representatives of covering-overcategory objects at x0
    over = sorted(f for f in c.into(x0) if f in tj)
    v_reps: list[str] = []
    assigned: dict[str, str] = {}
    for f in over:
        for r in v_reps:
            if any(
                c.compose(r, h) == f
                for h in c.isos(c.src(f), c.src(r))
            ):
                assigned[f] = r
                break
        else:
            v_reps.append(f)
            assigned[f] = f

    gal = [f for f in over if is_galois_covering(c, f) is not None]
    if not gal:
        raise InvariantViolation(f"no Galois covering of {x0} despite Y-site checks")
    minimal = [
        f for f in gal if all(hom_over(c, f, f2) for f2 in gal)
    ]
    if not minimal:
        raise InvariantViolation("covering category of x0 has no deepest object")
    f_star = min(minimal)
    y_star = c.src(f_star)

    hom_choices = []
    for sdx in v_reps:
        hs = sorted(hom_over(c, f_star, sdx))
        if not hs:
            raise InvariantViolation(
                f"deepest covering does not dominate the overcategory object {sdx}"
            )
        hom_choices.append(hs)
    chosen = min(itertools.product(*hom_choices))  # least comparison tuple

    factoring = set(chosen)
    for y in chosen:
        for gmor in c.out_of(c.dst(y)):
            if gmor in tj:
                factoring.add(c.compose(gmor, y))

    poset, obj_map, mor_map, rep_of = _skeleton_of_under(c, y_star, allowed=tj)
    keep = {rep_of[v] for v in factoring}
    sub_objs = sorted(keep)
    name_set = set()
    sub_mors = []
    for m in poset.morphisms:
        if poset.src(m) in keep and poset.dst(m) in keep:
            sub_mors.append(Mor(m, poset.src(m), poset.dst(m)))
            name_set.add(m)
    identity = {u: poset.identity[u] for u in sub_objs}
    comp = {
        pair: h
        for pair, h in poset.composition.items()
        if pair[0] in name_set and pair[1] in name_set
    }
    sub = FiniteCategory(sub_objs, sub_mors, identity, comp)
    iota = CatFunctor(
        source=sub,
        target=c,
        obj_map={u: obj_map[u] for u in sub_objs},
        mor_map={m.name: mor_map[m.name] for m in sub_mors},
    )
    return Grid(poset=sub, iota=iota)


def poset_minimum(p: FiniteCategory) -> str:
    """The object with an arrow to every object; finite connected thin
    posets used here always have one."""
    for x in p.objects:
        if all(p.hom(x, y) for y in p.objects):
            return x
    raise InvariantViolation("poset has no minimum object")


def build_grid(pre: Grid, s: Site) -> Grid:
    """Expand a pregrid into a grid.

    The poset is the skeleton of the full undercategory of the site at the
    image of the pregrid's deepest object; the structure functor takes a
    representative morphism to its target.
    """
    prep = validate_pregrid(pre, s)
    if not prep.passed:
        raise PreconditionError("input does not validate as a pregrid")
    c = s.category
    y_min = poset_minimum(pre.poset)
    base = pre.obj(y_min)
    poset, obj_map, mor_map, _ = _skeleton_of_under(c, base, allowed=None)
    iota = CatFunctor(source=poset, target=c, obj_map=obj_map, mor_map=mor_map)
    return Grid(poset=poset, iota=iota)


# -- transport between undercategories ----------------------------------------


@dataclass
class Transport:
    """The unique functor matching undercategories across a site morphism.

    For h: iota(z) -> iota(z'), maps each poset object above z' to the
    poset object above z whose image completes the evident square; the
    comparison isomorphism per object is recorded in ``xi``.
    """

    z: str
    z_prime: str
    h: str
    obj_map: dict[str, str]
    xi: dict[str, str]


def transport_under(g: Grid, s: Site, z: str, z_prime: str, h: str) -> Transport:
    """Compute the transported undercategory functor along h.

    Raises InvariantViolation when some object fails to transport, which on
    a valid grid cannot happen.
    """
    t = _transport(g, s, z, z_prime, h)
    if t is None:
        raise InvariantViolation(
            f"transport along {h} from {z_prime} to {z} is not total"
        )
    return t


def _transport(g: Grid, s: Site, z: str, z_prime: str, h: str) -> Transport | None:
    c = g.iota.target
    if c.src(h) != g.obj(z) or c.dst(h) != g.obj(z_prime):
        raise InputError(f"{h} does not run from the image of {z} to that of {z_prime}")
    obj_map: dict[str, str] = {}
    xi: dict[str, str] = {}
    for w_prime in g.under(z_prime):
        u_prime = g.mor(g.arrow(z_prime, w_prime))
        target = c.compose(u_prime, h)  # iota(z) -> iota(w')
        found = None
        for w in g.under(z):
            u = g.mor(g.arrow(z, w))
            for eps in c.isos(g.obj(w), g.obj(w_prime)):
                if c.compose(eps, u) == target:
                    found = (w, eps)
                    break
            if found:
                break
        if found is None:
            return None
        obj_map[w_prime], xi[w_prime] = found
    return Transport(z=z, z_prime=z_prime, h=h, obj_map=obj_map, xi=xi)


# -- grid comparison -----------------------------------------------------------


def grids_isomorphic(g1: Grid, g2: Grid) -> bool:
    """Search for a poset isomorphism with a compatible family of
    isomorphisms between the structure-functor images."""
    p1, p2 = g1.poset, g2.poset
    c = g1.iota.target
    if len(p1.objects) != len(p2.objects):
        return False

    def order_key(p, x):
        return (len(p.into(x)), len(p.out_of(x)))

    for perm in itertools.permutations(p2.objects):
        phi = dict(zip(p1.objects, perm))
        if any(order_key(p1, x) != order_key(p2, phi[x]) for x in p1.objects):
            continue
        if any(
            bool(p1.hom(x, y)) != bool(p2.hom(phi[x], phi[y]))
            for x, y in itertools.product(p1.objects, repeat=2)
        ):
            continue
        if _natural_family(g1, g2, phi, c):
            return True
    return False


def _natural_family(g1: Grid, g2: Grid, phi: dict[str, str], c) -> bool:
    objs = list(g1.poset.objects)
    choices = {x: c.isos(g1.obj(x), g2.obj(phi[x])) for x in objs}
    if any(not v for v in choices.values()):
        return False

    def ok(assigned: dict[str, str]) -> bool:
        for u in g1.poset.morphisms:
            x, y = g1.poset.src(u), g1.poset.dst(u)
            if x not in assigned or y not in assigned:
                continue
            v = g2.arrow(phi[x], phi[y])
            if v is None:
                return False
            lhs = c.compose(g2.mor(v), assigned[x])
            rhs = c.compose(assigned[y], g1.mor(u))
            if lhs != rhs:
                return False
        return True

    def search(i: int, assigned: dict[str, str]) -> bool:
        if i == len(objs):
            return True
        x = objs[i]
        for eps in choices[x]:
            assigned[x] = eps
            if ok(assigned) and search(i + 1, assigned):
                return True
            del assigned[x]
        return False

    return search(0, {})
