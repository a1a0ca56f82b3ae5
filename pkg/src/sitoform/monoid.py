"""The absolute Galois monoid of a finite grid.

Elements are pairs of a poset endo-functor and a family of comparison
isomorphisms between the structure functor and its twist.  On a finite
grid every element is determined by its value at the deepest covering of a
seed edge object, so enumeration proceeds by seeding comparison data there,
extending by undercategory transport, and verifying each candidate
globally.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cat import FiniteCategory
from .errors import InputError, InvariantViolation, PreconditionError
from .galois import GroupTable, aut_over
from .grid import Grid, Transport, _transport, edge_objects, poset_minimum
from .validation import Site


@dataclass(frozen=True)
class MonoidElement:
    """A poset endo-map with a comparison isomorphism per object."""

    alpha: tuple[tuple[str, str], ...]
    gamma: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, alpha: dict[str, str], gamma: dict[str, str]) -> "MonoidElement":
        return cls(tuple(sorted(alpha.items())), tuple(sorted(gamma.items())))

    def alpha_map(self) -> dict[str, str]:
        return dict(self.alpha)

    def gamma_map(self) -> dict[str, str]:
        return dict(self.gamma)

    def to_json(self) -> dict:
        return {"alpha": dict(self.alpha), "gamma": dict(self.gamma)}


@dataclass
class GaloisMonoid:
    """Enumerated monoid with multiplication table and fixing subgroups."""

    grid: Grid
    site: Site
    elements: tuple[MonoidElement, ...]
    mul: tuple[tuple[int, ...], ...]
    unit: int
    k_groups: dict[str, tuple[int, ...]]  # edge object -> sorted element indices

    def __len__(self):
        return len(self.elements)

    def op(self, i: int, j: int) -> int:
        return self.mul[i][j]

    def index_of(self, m: MonoidElement) -> int:
        return self.elements.index(m)

    def is_group(self) -> bool:
        n = len(self.elements)
        return all(
            any(self.mul[i][j] == self.unit and self.mul[j][i] == self.unit for j in range(n))
            for i in range(n)
        )

    def group_table(self) -> GroupTable:
        """The multiplication table as a group; requires invertibility."""
        if not self.is_group():
            raise PreconditionError("monoid is not a group")
        names = [f"m{i}" for i in range(len(self.elements))]
        mul = {
            (names[i], names[j]): names[self.mul[i][j]]
            for i in range(len(names))
            for j in range(len(names))
        }
        return GroupTable.build(names, mul, names[self.unit])

    def to_json(self) -> dict:
        return {
            "size": len(self.elements),
            "unit": self.unit,
            "elements": [m.to_json() for m in self.elements],
            "mul": [list(row) for row in self.mul],
            "k_groups": {x: list(v) for x, v in sorted(self.k_groups.items())},
        }


def _compose_elements(
    c: FiniteCategory, m1: MonoidElement, m2: MonoidElement
) -> MonoidElement:
    a1, g1 = m1.alpha_map(), m1.gamma_map()
    a2, g2 = m2.alpha_map(), m2.gamma_map()
    alpha = {x: a1[a2[x]] for x in a2}
    gamma = {x: c.compose(g1[a2[x]], g2[x]) for x in a2}
    return MonoidElement.of(alpha, gamma)


def _glue_candidate(
    g: Grid, s: Site, y_min: str, y_target: str, beta: str
) -> MonoidElement | None:
    """Extend seed data (alpha(y_min)=y_target with comparison beta) to a
    full candidate by transporting the undercategory of y_min, which is the
    whole poset."""
    c = s.category
    inv = c.inverse(beta)
    if inv is None:
        return None
    t = _transport(g, s, y_target, y_min, inv)
    if t is None:
        return None
    alpha: dict[str, str] = {}
    gamma: dict[str, str] = {}
    for w in g.poset.objects:
        if w not in t.obj_map:
            return None
        alpha[w] = t.obj_map[w]
        eps_inv = c.inverse(t.xi[w])
        if eps_inv is None:
            return None
        gamma[w] = eps_inv
    return MonoidElement.of(alpha, gamma)


def _verify_element(g: Grid, s: Site, m: MonoidElement) -> bool:
    c = s.category
    p = g.poset
    alpha, gamma = m.alpha_map(), m.gamma_map()
    for u in p.morphisms:
        x, y = p.src(u), p.dst(u)
        au = g.arrow(alpha[x], alpha[y])
        if au is None:
            return False
        lhs = c.compose(g.mor(au), gamma[x])
        rhs = c.compose(gamma[y], g.mor(u))
        if lhs != rhs:
            return False
    return True


def _covering_index(g: Grid, s: Site, x: str) -> list[str]:
    """Poset objects whose arrow into x maps to a Galois covering."""
    from .galois import is_galois_covering

    c = s.category
    tj = s.covering_members()
    out = []
    for y in g.poset.objects:
        arrow = g.arrow(y, x)
        if arrow is None:
            continue
        im = g.mor(arrow)
        if im in tj and is_galois_covering(c, im) is not None:
            out.append(y)
    return sorted(out)


def compute_monoid(g: Grid, s: Site) -> GaloisMonoid:
    """Enumerate the monoid of a validated finite grid.

    Seeds at the least edge object: for each target object with an
    isomorphic image and each comparison isomorphism, the compatible
    seed data at the deepest covering of the seed is enumerated (a single
    deck-group torsor in the finite case), glued outward by transport, and
    verified globally.  Failed extensions are discarded, not errors.
    """
    from .grid import validate_grid

    rep = validate_grid(g, s)
    if not rep.passed:
        raise PreconditionError("grid does not validate")
    c = s.category
    p = g.poset
    edges = edge_objects(g, s)
    if not edges:
        raise PreconditionError("grid has no edge objects")
    x0 = min(edges)

    index = _covering_index(g, s, x0)
    y_min = None
    for y in index:
        if all(p.hom(y, y2) for y2 in index):
            y_min = y
            break
    if y_min is None:
        raise InvariantViolation("covering index at the seed has no minimum")
    if any(not p.hom(y_min, w) for w in p.objects):
        raise InvariantViolation("deepest covering does not reach the whole poset")
    f_min = g.mor(g.arrow(y_min, x0))

    seen: dict[MonoidElement, None] = {}
    for x_target in p.objects:
        for beta in c.isos(g.obj(x0), g.obj(x_target)):
            base = c.compose(beta, f_min)
            # seed torsor: poset arrows into x_target whose image closes the square
            for y_target in p.objects:
                arrow = g.arrow(y_target, x_target)
                if arrow is None:
                    continue
                fprime = g.mor(arrow)
                for beta_p in c.isos(g.obj(y_min), g.obj(y_target)):
                    if c.compose(fprime, beta_p) != base:
                        continue
                    cand = _glue_candidate(g, s, y_min, y_target, beta_p)
                    if cand is None or not _verify_element(g, s, cand):
                        continue
                    seen.setdefault(cand, None)

    elements = tuple(sorted(seen, key=lambda m: (m.alpha, m.gamma)))
    index_of = {m: i for i, m in enumerate(elements)}

    unit = MonoidElement.of(
        {x: x for x in p.objects}, {x: c.identity[g.obj(x)] for x in p.objects}
    )
    if unit not in index_of:
        raise InvariantViolation("unit element missing from the enumeration")

    mul_rows = []
    for m1 in elements:
        row = []
        for m2 in elements:
            prod = _compose_elements(c, m1, m2)
            if prod not in index_of:
                raise InvariantViolation("monoid enumeration is not closed")
            row.append(index_of[prod])
        mul_rows.append(tuple(row))

    k_groups = {}
    for x in sorted(edges):
        idx = g.obj(x)
        members = tuple(
            i
            for i, m in enumerate(elements)
            if m.alpha_map()[x] == x and m.gamma_map()[x] == c.identity[idx]
        )
        k_groups[x] = members

    monoid = GaloisMonoid(
        grid=g,
        site=s,
        elements=elements,
        mul=tuple(mul_rows),
        unit=index_of[unit],
        k_groups=k_groups,
    )
    _check_k_groups(monoid)
    return monoid


def _check_k_groups(m: GaloisMonoid):
    """Each fixing submonoid at an edge object must be a group."""
    for x, members in m.k_groups.items():
        mem = set(members)
        for i in members:
            if not any(
                m.mul[i][j] == m.unit and m.mul[j][i] == m.unit
                for j in members
            ):
                raise InvariantViolation(f"fixing submonoid at {x} is not a group")
            if any(m.mul[i][j] not in mem for j in members):
                raise InvariantViolation(f"fixing submonoid at {x} is not closed")


def enumerate_monoid_bruteforce(g: Grid, s: Site, cap: int = 12) -> set[MonoidElement]:
    """Independent full enumeration over monotone maps and comparison
    families; used to cross-check the seeded route on small grids."""
    p = g.poset
    c = s.category
    if len(p.objects) > cap:
        raise InputError(f"grid larger than the brute-force cap {cap}")
    objs = list(p.objects)
    results: set[MonoidElement] = set()

    def assign(i: int, alpha: dict[str, str]):
        if i == len(objs):
            for gamma in _gamma_families(g, c, alpha):
                m = MonoidElement.of(alpha, gamma)
                if _verify_element(g, s, m):
                    results.add(m)
            return
        x = objs[i]
        for tgt in objs:
            if not c.isos(g.obj(x), g.obj(tgt)):
                continue
            alpha[x] = tgt
            if all(
                g.arrow(alpha[p.src(u)], alpha[p.dst(u)]) is not None
                for u in p.morphisms
                if p.src(u) in alpha and p.dst(u) in alpha
            ):
                assign(i + 1, alpha)
            del alpha[x]

    assign(0, {})
    return results


def _gamma_families(g: Grid, c: FiniteCategory, alpha: dict[str, str]):
    objs = list(g.poset.objects)
    choices = [c.isos(g.obj(x), g.obj(alpha[x])) for x in objs]
    for combo in itertools.product(*choices):
        yield dict(zip(objs, combo))


# -- fixing groups and the covering-limit group --------------------------------


def fixing_group(m: GaloisMonoid, x: str) -> GroupTable:
    """The group of elements fixing an edge object and acting as the
    identity on its image."""
    if x not in m.k_groups:
        raise PreconditionError(f"{x} is not an edge object")
    members = m.k_groups[x]
    names = {i: f"m{i}" for i in members}
    mul = {
        (names[i], names[j]): names[m.mul[i][j]]
        for i in members
        for j in members
    }
    return GroupTable.build(list(names.values()), mul, names[m.unit])


@dataclass
class CoveringLimitGroup:
    """The limit of deck groups over the covering index of an edge object,
    with the mutually inverse comparison maps to the fixing group."""

    edge_object: str
    index: tuple[str, ...]  # poset objects covering the edge object
    groups: dict[str, GroupTable]
    transitions: dict[tuple[str, str], dict[str, str]]
    families: tuple[tuple[tuple[str, str], ...], ...]  # sorted (index, deck elt) tuples
    to_monoid: dict[tuple, int]  # family -> element index (bijective onto K)
    from_monoid: dict[int, tuple]  # element index -> family


def covering_limit_group(m: GaloisMonoid, x: str) -> CoveringLimitGroup:
    """Build the deck-group limit at an edge object and verify that the two
    canonical maps between it and the fixing group are mutually inverse."""
    g, s = m.grid, m.site
    c = s.category
    p = g.poset
    if x not in m.k_groups:
        raise PreconditionError(f"{x} is not an edge object")
    index = _covering_index(g, s, x)
    groups = {y: aut_over(c, g.mor(g.arrow(y, x))) for y in index}

    transitions: dict[tuple[str, str], dict[str, str]] = {}
    for y2 in index:
        for y1 in index:
            if y1 == y2 or not p.hom(y2, y1):
                continue
            w = g.mor(g.arrow(y2, y1))
            table = {}
            for a in groups[y2].elements:
                target = c.compose(w, a)
                for a1 in groups[y1].elements:
                    if c.compose(a1, w) == target:
                        table[a] = a1
                        break
                else:
                    raise InvariantViolation(
                        f"deck element {a} does not descend along {w}"
                    )
            if set(table.values()) != set(groups[y1].elements):
                raise InvariantViolation(
                    f"deck transition {y2}->{y1} is not surjective"
                )
            transitions[(y2, y1)] = table

    y_min = None
    for y in index:
        if all(p.hom(y, y2) for y2 in index):
            y_min = y
            break
    if y_min is None:
        raise InvariantViolation("covering index has no minimum")

    families = []
    for b in groups[y_min].elements:
        fam = {y_min: b}
        for y in index:
            if y != y_min:
                fam[y] = transitions[(y_min, y)][b]
        for y2 in index:
            for y1 in index:
                if y1 != y2 and p.hom(y2, y1):
                    if transitions[(y2, y1)][fam[y2]] != fam[y1]:
                        raise InvariantViolation("incompatible deck family")
        families.append(tuple(sorted(fam.items())))

    to_monoid: dict[tuple, int] = {}
    for fam in families:
        beta = dict(fam)[y_min]
        cand = _glue_candidate(g, s, y_min, y_min, beta)
        if cand is None or not _verify_element(g, s, cand):
            raise InvariantViolation("deck family does not glue to a monoid element")
        idx = m.elements.index(cand)
        if idx not in m.k_groups[x]:
            raise InvariantViolation("glued element escapes the fixing group")
        to_monoid[fam] = idx

    from_monoid: dict[int, tuple] = {}
    for i in m.k_groups[x]:
        gamma = m.elements[i].gamma_map()
        fam = tuple(sorted((y, gamma[y]) for y in index))
        for y in index:
            if dict(fam)[y] not in set(groups[y].elements):
                raise InvariantViolation(
                    f"comparison at {y} is not a deck transformation"
                )
        from_monoid[i] = fam

    if sorted(to_monoid.values()) != sorted(m.k_groups[x]):
        raise InvariantViolation("limit group does not surject onto the fixing group")
    for fam, i in to_monoid.items():
        if from_monoid[i] != fam:
            raise InvariantViolation("comparison maps are not mutually inverse")
    for i, fam in from_monoid.items():
        if to_monoid[fam] != i:
            raise InvariantViolation("comparison maps are not mutually inverse")

    return CoveringLimitGroup(
        edge_object=x,
        index=tuple(index),
        groups=groups,
        transitions=transitions,
        families=tuple(families),
        to_monoid=to_monoid,
        from_monoid=from_monoid,
    )


# -- the coset neighborhood basis ----------------------------------------------


def coset_neighborhood_basis(m: GaloisMonoid) -> dict:
    """Cosets of the fixing groups as a neighborhood basis.

    Verifies the filter-base axiom and the translation-continuity witness,
    and reports discreteness when the fixing groups intersect trivially.
    """
    edges = sorted(m.k_groups)
    cosets: dict[tuple[int, str], frozenset[int]] = {}
    for i in range(len(m.elements)):
        for x in edges:
            cosets[(i, x)] = frozenset(m.mul[i][k] for k in m.k_groups[x])

    filter_base = True
    base_witness = None
    for (i1, x1), c1 in cosets.items():
        for (i2, x2), c2 in cosets.items():
            inter = c1 & c2
            for mm in inter:
                if not any(
                    cosets[(mm, y)] <= inter for y in edges
                ):
                    filter_base = False
                    base_witness = (i1, x1, i2, x2, mm)
                    break
            if not filter_base:
                break
        if not filter_base:
            break

    translation = {}
    continuous = True
    for i in range(len(m.elements)):
        for x in edges:
            right = frozenset(m.mul[i][k] for k in m.k_groups[x])
            wit = None
            for y in edges:
                left = frozenset(m.mul[k][i] for k in m.k_groups[y])
                if left <= right:
                    wit = y
                    break
            translation[(i, x)] = wit
            if wit is None:
                continuous = False

    common = set(range(len(m.elements)))
    for x in edges:
        common &= set(m.k_groups[x])
    discrete = common == {m.unit}

    return {
        "cosets": {
            f"m{i}*K[{x}]": sorted(v) for (i, x), v in sorted(cosets.items())
        },
        "filter_base": filter_base,
        "filter_base_witness": base_witness,
        "translation_continuous": continuous,
        "translation_witness": {
            f"m{i}|{x}": w for (i, x), w in sorted(translation.items())
        },
        "discrete": discrete,
    }
