"""Deck-transformation machinery: pseudo-torsors, Galois coverings, and
finite torsor systems over directed index posets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cat import FiniteCategory, Mor, identity_name
from .errors import InputError, PreconditionError
from .topology import MorphismCollection, saturate


# -- groups as multiplication tables ---------------------------------------


@dataclass(frozen=True)
class GroupTable:
    """A finite group with elements sorted by id and explicit tables."""

    elements: tuple[str, ...]
    mul: dict[tuple[str, str], str]
    unit: str
    inv: dict[str, str]

    @classmethod
    def build(cls, elements, mul, unit) -> "GroupTable":
        elements = tuple(sorted(elements))
        inv = {}
        for a in elements:
            for b in elements:
                if mul[(a, b)] == unit and mul[(b, a)] == unit:
                    inv[a] = b
                    break
            else:
                raise InputError(f"element {a} has no inverse")
        g = cls(elements, dict(mul), unit, inv)
        g.check()
        return g

    def check(self):
        es = set(self.elements)
        if self.unit not in es:
            raise InputError("unit is not an element")
        for a, b in itertools.product(self.elements, repeat=2):
            if self.mul.get((a, b)) not in es:
                raise InputError(f"multiplication not total at ({a},{b})")
        for a in self.elements:
            if self.mul[(a, self.unit)] != a or self.mul[(self.unit, a)] != a:
                raise InputError(f"unit law fails at {a}")
            if self.mul[(a, self.inv[a])] != self.unit:
                raise InputError(f"inverse law fails at {a}")
        for a, b, c in itertools.product(self.elements, repeat=3):
            if self.mul[(self.mul[(a, b)], c)] != self.mul[(a, self.mul[(b, c)])]:
                raise InputError(f"associativity fails at ({a},{b},{c})")

    def __len__(self):
        return len(self.elements)

    def op(self, a: str, b: str) -> str:
        return self.mul[(a, b)]

    def order_of(self, a: str) -> int:
        n, x = 1, a
        while x != self.unit:
            x = self.op(x, a)
            n += 1
        return n

    def to_json(self) -> dict:
        return {
            "elements": list(self.elements),
            "mul": [[self.mul[(a, b)] for b in self.elements] for a in self.elements],
            "unit": self.unit,
        }

    @classmethod
    def trivial(cls) -> "GroupTable":
        return cls.build(("1",), {("1", "1"): "1"}, "1")

    @classmethod
    def cyclic(cls, n: int) -> "GroupTable":
        els = [f"g{i}" for i in range(n)]
        mul = {
            (f"g{i}", f"g{j}"): f"g{(i + j) % n}"
            for i in range(n)
            for j in range(n)
        }
        return cls.build(els, mul, "g0")

    @classmethod
    def direct_product(cls, g: "GroupTable", h: "GroupTable") -> "GroupTable":
        els = [f"{a}|{b}" for a in g.elements for b in h.elements]
        mul = {}
        for a1, b1 in itertools.product(g.elements, h.elements):
            for a2, b2 in itertools.product(g.elements, h.elements):
                mul[(f"{a1}|{b1}", f"{a2}|{b2}")] = f"{g.op(a1, a2)}|{h.op(b1, b2)}"
        return cls.build(els, mul, f"{g.unit}|{h.unit}")

    @classmethod
    def symmetric(cls, n: int) -> "GroupTable":
        perms = list(itertools.permutations(range(n)))
        name = {p: "p" + "".join(str(i) for i in p) for p in perms}
        mul = {}
        for p in perms:
            for q in perms:
                pq = tuple(p[q[i]] for i in range(n))
                mul[(name[p], name[q])] = name[pq]
        return cls.build(list(name.values()), mul, name[tuple(range(n))])


def groups_isomorphic(g: GroupTable, h: GroupTable) -> dict[str, str] | None:
    """Exhaustive isomorphism search with element-order pruning (|G| <= 24)."""
    if len(g) != len(h):
        return None
    g_orders = {a: g.order_of(a) for a in g.elements}
    h_by_order: dict[int, list[str]] = {}
    for b in h.elements:
        h_by_order.setdefault(h.order_of(b), []).append(b)
    if sorted(g_orders.values()) != sorted(
        h.order_of(b) for b in h.elements
    ):
        return None

    gens: list[str] = []
    generated = {g.unit}
    for a in g.elements:
        if a in generated:
            continue
        gens.append(a)
        frontier = set(generated) | {a}
        while True:
            new = {g.op(x, y) for x in frontier for y in frontier} | frontier
            if new == frontier:
                break
            frontier = new
        generated = frontier
        if len(generated) == len(g):
            break

    def words(images: dict[str, str]) -> dict[str, str] | None:
        # close the partial map under multiplication; None on conflict
        table = {g.unit: h.unit}
        table.update(images)
        frontier = list(table)
        while frontier:
            nxt = []
            for a in list(table):
                for b in frontier:
                    ab = g.op(a, b)
                    img = h.op(table[a], table[b])
                    if table.get(ab, img) != img:
                        return None
                    if ab not in table:
                        table[ab] = img
                        nxt.append(ab)
                    ba = g.op(b, a)
                    img2 = h.op(table[b], table[a])
                    if table.get(ba, img2) != img2:
                        return None
                    if ba not in table:
                        table[ba] = img2
                        nxt.append(ba)
            frontier = nxt
        if len(table) != len(g) or len(set(table.values())) != len(g):
            return None
        return table

    candidates = [h_by_order[g_orders[a]] for a in gens]
    for choice in itertools.product(*candidates):
        iso = words(dict(zip(gens, choice)))
        if iso is not None:
            return iso
    return None


@dataclass(frozen=True)
class GroupAction:
    """A left action of a group table on a finite carrier set."""

    group: GroupTable
    carrier: tuple[str, ...]
    act: dict[tuple[str, str], str]

    def __post_init__(self):
        for g, s in itertools.product(self.group.elements, self.carrier):
            if self.act.get((g, s)) not in set(self.carrier):
                raise InputError(f"action not total at ({g},{s})")
        for s in self.carrier:
            if self.act[(self.group.unit, s)] != s:
                raise InputError(f"unit does not fix {s}")
        for g, h in itertools.product(self.group.elements, repeat=2):
            for s in self.carrier:
                if self.act[(g, self.act[(h, s)])] != self.act[(self.group.op(g, h), s)]:
                    raise InputError(f"action law fails at ({g},{h},{s})")

    def apply(self, g: str, s: str) -> str:
        return self.act[(g, s)]

    def orbit(self, s: str) -> frozenset[str]:
        return frozenset(self.apply(g, s) for g in self.group.elements)


def is_pseudo_torsor(
    phi: dict[str, str], action: GroupAction
) -> tuple[bool, int | None]:
    """Check invariance, freeness, and orbit-injectivity of phi.

    Returns (True, None) or (False, violated condition number).
    """
    for s in action.carrier:
        if s not in phi:
            raise InputError(f"phi undefined at {s}")
    for g in action.group.elements:
        for s in action.carrier:
            if phi[action.apply(g, s)] != phi[s]:
                return False, 1
    for g in action.group.elements:
        if g == action.group.unit:
            continue
        for s in action.carrier:
            if action.apply(g, s) == s:
                return False, 2
    orbits = {}
    for s in action.carrier:
        key = min(action.orbit(s))
        if key in orbits:
            continue
        orbits[key] = phi[s]
    values = list(orbits.values())
    if len(set(values)) != len(values):
        return False, 3
    return True, None


# -- hom sets over a base ---------------------------------------------------


def hom_over(c: FiniteCategory, f1: str, f2: str) -> tuple[str, ...]:
    """Morphisms h: src(f1) -> src(f2) with f2∘h = f1."""
    if c.dst(f1) != c.dst(f2):
        raise InputError("morphisms do not share a codomain")
    y1, y2 = c.src(f1), c.src(f2)
    return tuple(h for h in c.hom(y1, y2) if c.compose(f2, h) == f1)


def end_over(c: FiniteCategory, f: str) -> tuple[str, ...]:
    return hom_over(c, f, f)


def aut_over(c: FiniteCategory, f: str) -> GroupTable:
    """The automorphism group of src(f) over dst(f), as a table."""
    els = [h for h in end_over(c, f) if c.is_iso(h)]
    mul = {(a, b): c.compose(a, b) for a in els for b in els}
    return GroupTable.build(els, mul, c.identity[c.src(f)])


def is_galois_covering(c: FiniteCategory, f: str) -> GroupTable | None:
    """The deck group of f when every hom-map onto it is a pseudo-torsor.

    Testing the full over-automorphism group of f is complete: any group
    witnessing the covering property is carried isomorphically onto it.
    """
    g = aut_over(c, f)
    y, x = c.src(f), c.dst(f)
    for z in c.objects:
        hom_zy = c.hom(z, y)
        if not hom_zy:
            continue
        act = {(a, h): c.compose(a, h) for a in g.elements for h in hom_zy}
        action = GroupAction(g, tuple(sorted(hom_zy)), act)
        phi = {h: c.compose(f, h) for h in hom_zy}
        ok, _ = is_pseudo_torsor(phi, action)
        if not ok:
            return None
    return g


def galois_coverings(c: FiniteCategory) -> frozenset[str]:
    return frozenset(f for f in c.morphisms if is_galois_covering(c, f) is not None)


def enough_galois_coverings(
    c: FiniteCategory, t: MorphismCollection
) -> tuple[bool, str | None]:
    """Saturation of the Galois coverings equals the saturation of t.

    The witness is the least morphism lying in one saturation but not the
    other.
    """
    t_gal = MorphismCollection(c, galois_coverings(c))
    sat_gal = saturate(t_gal).members
    sat_t = saturate(t).members
    if sat_gal == sat_t:
        return True, None
    return False, min(sat_gal.symmetric_difference(sat_t))


def galois_refinement(
    c: FiniteCategory, tj: frozenset[str], f: str
) -> str | None:
    """Least g with f∘g a Galois covering inside the covering collection."""
    y = c.src(f)
    for g in sorted(c.into(y)):
        fg = c.compose(f, g)
        if fg in tj and is_galois_covering(c, fg) is not None:
            return g
    return None


def galois_category_over(site, x: str) -> FiniteCategory:
    """The thin category of Galois coverings of x inside the covering
    collection, with at most one morphism between any two coverings.

    Raises PreconditionError when the site lacks enough Galois coverings,
    and InvariantViolation if thinness or cofilteredness fails.
    """
    from .errors import InvariantViolation

    c = site.category
    tj = site.covering_members()
    ok, _ = enough_galois_coverings(c, site.topology.basis)
    if not ok:
        raise PreconditionError("site lacks enough Galois coverings")
    objs = sorted(
        f for f in c.into(x) if f in tj and is_galois_covering(c, f) is not None
    )
    mors = []
    for f1, f2 in itertools.product(objs, repeat=2):
        if f1 == f2:
            continue
        homs = hom_over(c, f1, f2)
        if not homs:
            continue
        aut2 = aut_over(c, f2).elements
        classes = set()
        for h in homs:
            classes.add(frozenset(c.compose(a, h) for a in aut2))
        if len(classes) != 1:
            raise InvariantViolation(
                f"coverings {f1},{f2} admit several morphism classes"
            )
        mors.append(Mor(f"cl:{f1}>{f2}", f1, f2))
    identity = {f: identity_name(f) for f in objs}
    all_mors = [Mor(identity[f], f, f) for f in objs] + mors
    by_pair = {(m.src, m.dst): m.name for m in all_mors}
    comp = {}
    for m1 in all_mors:
        for m2 in all_mors:
            if m1.dst != m2.src:
                continue
            try:
                comp[(m2.name, m1.name)] = by_pair[(m1.src, m2.dst)]
            except KeyError:
                raise InvariantViolation(
                    f"composite {m2.name}∘{m1.name} leaves the covering category"
                ) from None
    cat = FiniteCategory(objs, all_mors, identity, comp)
    for f1, f2 in itertools.product(objs, repeat=2):
        if not any(by_pair.get((z, f1)) and by_pair.get((z, f2)) for z in objs):
            raise InvariantViolation(f"coverings {f1},{f2} have no common refinement")
    return cat


# -- torsor systems over finite directed posets ------------------------------


@dataclass
class TorsorSystem:
    """A projective system of torsors over a finite directed index poset.

    indices      sorted index ids
    leq          set of (i, j) pairs with i <= j (reflexive pairs implied)
    groups       index -> GroupTable
    hom          (j, i) -> group homomorphism dict, for i <= j
    torsors      index -> GroupAction (each carrier a torsor for its group)
    maps         (j, i) -> equivariant carrier map dict, for i <= j
    """

    indices: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    groups: dict[str, GroupTable]
    hom: dict[tuple[str, str], dict[str, str]]
    torsors: dict[str, GroupAction]
    maps: dict[tuple[str, str], dict[str, str]]

    def le(self, i: str, j: str) -> bool:
        return i == j or (i, j) in self.leq

    def validate(self):
        pairs = [(i, j) for i in self.indices for j in self.indices if self.le(i, j)]
        for i, j in pairs:
            if i == j:
                continue
            if (j, i) not in self.hom or (j, i) not in self.maps:
                raise InputError(f"missing transition data for {j}>={i}")
        # directedness: a common upper bound for every pair
        for i, j in itertools.combinations(self.indices, 2):
            if not any(self.le(i, k) and self.le(j, k) for k in self.indices):
                raise InputError(f"index poset not directed at ({i},{j})")
        for idx in self.indices:
            action = self.torsors[idx]
            if not action.carrier:
                raise InputError(f"carrier at {idx} is empty, not a torsor")
            s0 = action.carrier[0]
            reached = {action.apply(g, s0) for g in action.group.elements}
            if reached != set(action.carrier) or len(reached) != len(
                action.group.elements
            ):
                raise InputError(f"carrier at {idx} is not a torsor")
        for (j, i), phi in self.hom.items():
            gj, gi = self.groups[j], self.groups[i]
            if phi[gj.unit] != gi.unit:
                raise InputError(f"transition {j}->{i} does not preserve the unit")
            for a, b in itertools.product(gj.elements, repeat=2):
                if phi[gj.op(a, b)] != gi.op(phi[a], phi[b]):
                    raise InputError(f"transition {j}->{i} is not a homomorphism")
        for (j, i), fmap in self.maps.items():
            phi = self.hom[(j, i)]
            tj, ti = self.torsors[j], self.torsors[i]
            for g in tj.group.elements:
                for s in tj.carrier:
                    if fmap[tj.apply(g, s)] != ti.apply(phi[g], fmap[s]):
                        raise InputError(f"map {j}->{i} is not equivariant")
        # transitions compose along the poset
        for i, j in pairs:
            for k in self.indices:
                if i == j or j == k or not self.le(j, k):
                    continue
                for s in self.torsors[k].carrier:
                    via = self.maps[(j, i)][self.maps[(k, j)][s]]
                    if via != self.maps[(k, i)][s]:
                        raise InputError(
                            f"transitions {k}->{j}->{i} do not compose"
                        )


def torsor_limit(ts: TorsorSystem) -> dict[str, str]:
    """A compatible family of the system, lexicographically least.

    A finite directed poset has a maximum; any choice there pushes down to a
    full compatible family, so the limit of a valid finite system is never
    empty.
    """
    ts.validate()
    top = None
    for cand in ts.indices:
        if all(ts.le(i, cand) for i in ts.indices):
            top = cand
            break
    if top is None:
        raise InputError("index poset has no maximum despite being directed")
    for s_top in sorted(ts.torsors[top].carrier):
        family = {top: s_top}
        for i in ts.indices:
            if i != top:
                family[i] = ts.maps[(top, i)][s_top]
        if _family_compatible(ts, family):
            return family
    raise InputError("no compatible family exists; transitions are inconsistent")


def _family_compatible(ts: TorsorSystem, family: dict[str, str]) -> bool:
    for i in ts.indices:
        for j in ts.indices:
            if i != j and ts.le(i, j):
                if ts.maps[(j, i)][family[j]] != family[i]:
                    return False
    return True
