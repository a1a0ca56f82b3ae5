"""Smooth monoid sets, the fiber functor, and the equivalence checks.

The fiber functor sends a presheaf to the filtered colimit of its sections
over the grid, carrying a natural action of the Galois monoid; a monoid
set is smooth when every point is fixed by the fixing group of some edge
object.  This module also rebuilds a sheaf from a smooth set and runs the
finite equivalence verification between the two sides.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import InputError, InvariantViolation, PreconditionError, ResourceLimitError
from .grid import edge_objects
from .monoid import GaloisMonoid, MonoidElement
from .sheaves import (
    Presheaf,
    PresheafMorphism,
    is_sheaf,
    presheaf_hom,
    representable,
)
from .util import UnionFind


@dataclass
class SmoothMSet:
    """A finite left monoid set with stabilizer witnesses per point."""

    monoid: GaloisMonoid
    carrier: tuple[str, ...]
    action: dict[tuple[int, str], str]
    stabilizer_witness: dict[str, str] = field(default_factory=dict)
    class_of: dict | None = None  # provenance when built as a colimit

    def apply(self, i: int, pt: str) -> str:
        return self.action[(i, pt)]

    def to_json(self) -> dict:
        return {
            "carrier": list(self.carrier),
            "action": {
                f"m{i}|{p}": q for (i, p), q in sorted(self.action.items())
            },
            "stabilizer_witness": dict(sorted(self.stabilizer_witness.items())),
        }


def smooth_check(m: GaloisMonoid, t: SmoothMSet) -> tuple[bool, str | None]:
    """Verify the action laws (input error on failure) and smoothness."""
    n = len(m.elements)
    for pt in t.carrier:
        if t.action.get((m.unit, pt)) != pt:
            raise InputError(f"unit does not fix {pt}")
    for i in range(n):
        for j in range(n):
            for pt in t.carrier:
                if t.apply(i, t.apply(j, pt)) != t.apply(m.mul[i][j], pt):
                    raise InputError(f"action law fails at (m{i},m{j},{pt})")
    for pt in t.carrier:
        witness = None
        for x in sorted(m.k_groups):
            if all(t.apply(k, pt) == pt for k in m.k_groups[x]):
                witness = x
                break
        if witness is None:
            return False, pt
        t.stabilizer_witness.setdefault(pt, witness)
    return True, None


# -- the fiber functor ---------------------------------------------------------


def fiber_functor(m: GaloisMonoid, f: Presheaf) -> SmoothMSet:
    """Colimit of sections over the grid with the transported monoid action."""
    g, s = m.grid, m.site
    c = s.category
    p = g.poset

    uf = UnionFind()
    for w in p.objects:
        for sec in f.at(g.obj(w)):
            uf.add((w, sec))
    for u in p.morphisms:
        if p.is_identity(u):
            continue
        w1, w2 = p.src(u), p.dst(u)
        for sec in f.at(g.obj(w2)):
            pushed = f.restrict(g.mor(u), sec)
            uf.add((w1, pushed))
            uf.union((w2, sec), (w1, pushed))

    tag = lambda node: f"{node[0]}|{node[1]}"
    reps: dict = {}
    for node in uf.parent:
        root = uf.find(node)
        cur = reps.get(root)
        if cur is None or tag(node) < tag(cur):
            reps[root] = node
    class_of = {node: f"class:{tag(reps[uf.find(node)])}" for node in uf.parent}
    carrier = tuple(sorted(set(class_of.values())))

    edges = edge_objects(g, s)
    witness: dict[str, str] = {}
    for node, cls in class_of.items():
        w = node[0]
        if w in edges and (cls not in witness or w < witness[cls]):
            witness[cls] = w
    if set(witness) != set(carrier):
        raise InvariantViolation("a colimit class misses every edge object")

    least_node = {}
    for node, cls in class_of.items():
        if cls not in least_node or tag(node) < tag(least_node[cls]):
            least_node[cls] = node

    action: dict[tuple[int, str], str] = {}
    for i, elt in enumerate(m.elements):
        alpha, gamma = elt.alpha_map(), elt.gamma_map()
        for cls in carrier:
            w, sec = least_node[cls]
            inv = c.inverse(gamma[w])
            moved = f.restrict(inv, sec) if not c.is_identity(inv) else sec
            key = (alpha[w], moved)
            if key not in class_of:
                raise InvariantViolation("monoid action left the colimit")
            action[(i, cls)] = class_of[key]

    t = SmoothMSet(
        monoid=m,
        carrier=carrier,
        action=action,
        stabilizer_witness=dict(witness),
        class_of=class_of,
    )
    ok, bad = smooth_check(m, t)
    if not ok:
        raise InvariantViolation(f"fiber functor output is not smooth at {bad}")
    return t


def omega_on_morphism(
    m: GaloisMonoid, phi: PresheafMorphism, src: SmoothMSet, dst: SmoothMSet
) -> dict[str, str]:
    """The induced map on colimit classes of a presheaf morphism."""
    g = m.grid
    out = {}
    least = {}
    for node, cls in src.class_of.items():
        if cls not in least or f"{node[0]}|{node[1]}" < f"{least[cls][0]}|{least[cls][1]}":
            least[cls] = node
    for cls, (w, sec) in least.items():
        img = phi.components[g.obj(w)][sec]
        out[cls] = dst.class_of[(w, img)]
    return out


# -- maps and isomorphism of monoid sets --------------------------------------


def equivariant_maps(t1: SmoothMSet, t2: SmoothMSet) -> list[dict[str, str]]:
    """All maps commuting with the monoid action."""
    m = t1.monoid
    pts = list(t1.carrier)
    results = []

    def search(i: int, assigned: dict[str, str]):
        if i == len(pts):
            results.append(dict(assigned))
            return
        p = pts[i]
        for q in t2.carrier:
            assigned[p] = q
            if _equivariant_so_far(m, t1, t2, assigned):
                search(i + 1, assigned)
            del assigned[p]

    if not t1.carrier:
        return [{}]
    search(0, {})
    return results


def _equivariant_so_far(m, t1, t2, assigned) -> bool:
    for i in range(len(m.elements)):
        for p, q in assigned.items():
            moved = t1.apply(i, p)
            if moved in assigned and assigned[moved] != t2.apply(i, q):
                return False
    return True


def msets_isomorphic(t1: SmoothMSet, t2: SmoothMSet) -> dict[str, str] | None:
    if len(t1.carrier) != len(t2.carrier):
        return None
    for f in equivariant_maps(t1, t2):
        if len(set(f.values())) == len(t2.carrier):
            return f
    return None


# -- enumeration of smooth monoid sets ------------------------------------------


def monoid_generators(m: GaloisMonoid) -> list[int]:
    """A small generating set, greedily by element index."""
    n = len(m.elements)
    gens: list[int] = []

    def closure(base: set[int]) -> set[int]:
        out = set(base)
        changed = True
        while changed:
            changed = False
            for i in list(out):
                for j in list(out):
                    k = m.mul[i][j]
                    if k not in out:
                        out.add(k)
                        changed = True
        return out

    span = closure({m.unit})
    while len(span) < n:
        nxt = min(i for i in range(n) if i not in span)
        gens.append(nxt)
        span = closure({m.unit, *gens})
    return gens


def _element_words(m: GaloisMonoid, gens: list[int]) -> dict[int, list[int]]:
    """Express each element as a left-to-right product of generators."""
    words = {m.unit: []}
    frontier = [m.unit]
    while frontier:
        nxt = []
        for i in frontier:
            for gidx in gens:
                k = m.mul[gidx][i]
                if k not in words:
                    words[k] = [gidx] + words[i]
                    nxt.append(k)
        frontier = nxt
    if len(words) != len(m.elements):
        raise InvariantViolation("generators do not span the monoid")
    return words


def enumerate_smooth_msets(m: GaloisMonoid, bound: int) -> list[SmoothMSet]:
    """All smooth monoid sets with at most ``bound`` points, up to
    equivariant isomorphism."""
    gens = monoid_generators(m)
    words = _element_words(m, gens)
    out: list[SmoothMSet] = []

    empty = SmoothMSet(m, (), {}, {})
    smooth_check(m, empty)
    out.append(empty)

    for size in range(1, bound + 1):
        pts = tuple(f"t{i}" for i in range(size))
        maps = list(itertools.product(range(size), repeat=size))
        for combo in itertools.product(maps, repeat=len(gens)):
            gen_map = {gens[j]: combo[j] for j in range(len(gens))}
            act_of: dict[int, tuple[int, ...]] = {m.unit: tuple(range(size))}
            for i, word in sorted(words.items(), key=lambda kv: len(kv[1])):
                if i == m.unit:
                    continue
                table = tuple(range(size))
                for gidx in reversed(word):
                    table = tuple(gen_map[gidx][table[k]] for k in range(size))
                act_of[i] = table
            ok = all(
                act_of[m.mul[gidx][i]]
                == tuple(gen_map[gidx][act_of[i][k]] for k in range(size))
                for gidx in gens
                for i in range(len(m.elements))
            )
            if not ok:
                continue
            action = {
                (i, pts[k]): pts[act_of[i][k]]
                for i in range(len(m.elements))
                for k in range(size)
            }
            cand = SmoothMSet(m, pts, action, {})
            smooth, _ = smooth_check(m, cand)
            if not smooth:
                continue
            if any(msets_isomorphic(cand, t) for t in out):
                continue
            out.append(cand)
    return out


# -- sheaves from smooth sets ----------------------------------------------


def _base_choice(m: GaloisMonoid) -> dict[str, tuple[str, str]]:
    """Per site object: the least (edge object, comparison iso) pair."""
    g, s = m.grid, m.site
    c = s.category
    edges = sorted(m.k_groups)
    out = {}
    for x in c.objects:
        found = None
        for e in edges:
            for beta in c.isos(g.obj(e), x):
                found = (e, beta)
                break
            if found:
                break
        if found is None:
            raise InvariantViolation(f"no edge object lands on {x}")
        out[x] = found
    return out


def _element_with_seed(m: GaloisMonoid, e_obj: str, target: str, beta: str) -> int:
    """Least monoid element sending the edge object to the target with the
    given comparison."""
    for i, elt in enumerate(m.elements):
        if elt.alpha_map()[e_obj] == target and elt.gamma_map()[e_obj] == beta:
            return i
    raise InvariantViolation(
        f"no monoid element moves {e_obj} to {target} with the required comparison"
    )


def sheaf_from_smooth_set(m: GaloisMonoid, t: SmoothMSet) -> Presheaf:
    """Rebuild the sheaf of fixed points from a smooth monoid set.

    Sections over X are the points fixed by the fixing group of the chosen
    edge object under X; restriction along a site morphism acts by a monoid
    element transporting one chosen edge object onto the other.
    """
    ok, bad = smooth_check(m, t)
    if not ok:
        raise PreconditionError(f"monoid set is not smooth at {bad}")
    g, s = m.grid, m.site
    c = s.category
    p = g.poset
    base = _base_choice(m)

    sections: dict[str, tuple[str, ...]] = {}
    for x in c.objects:
        e, _ = base[x]
        fixed = tuple(
            pt
            for pt in t.carrier
            if all(t.apply(k, pt) == pt for k in m.k_groups[e])
        )
        sections[x] = fixed

    restrictions: dict[str, dict[str, str]] = {}
    for u in c.morphisms:
        if c.is_identity(u):
            continue
        x, y = c.src(u), c.dst(u)
        e_x, beta_x = base[x]
        e_y, beta_y = base[y]
        composite = c.compose(u, beta_x)  # iota(E_X) -> Y
        found = None
        for w in g.under(e_x):
            arrow = g.arrow(e_x, w)
            for beta_pr in c.isos(g.obj(w), y):
                if c.compose(beta_pr, g.mor(arrow)) == composite:
                    found = (w, beta_pr)
                    break
            if found:
                break
        if found is None:
            raise InvariantViolation(
                f"morphism {u} does not factor through the undercategory at {e_x}"
            )
        y_prime, beta_pr = found
        beta = c.compose(c.inverse(beta_pr), beta_y)  # iota(E_Y) -> iota(Y')
        idx = _element_with_seed(m, e_y, y_prime, beta)
        table = {}
        for pt in sections[y]:
            img = t.apply(idx, pt)
            if img not in set(sections[x]):
                raise InvariantViolation(
                    f"transported point {img} is not fixed over {x}"
                )
            table[pt] = img
        restrictions[u] = table

    return Presheaf(s, sections, restrictions)


# -- verification of the equivalence -------------------------------------------


def verify_equivalence(m: GaloisMonoid, bound: int, cap: int = 64) -> dict:
    """Exhaustive finite check that the fiber functor is an equivalence.

    (a) the induced map on hom sets is bijective for every pair of test
        sheaves; (b) every smooth set up to the bound is hit, point by
        point, by the fixed-point sheaf; (c) sections over an edge-object
        image match the fixed points of its fixing group.
    """
    from .sheaves import enumerate_sheaves

    sheaves = enumerate_sheaves(m.site, bound)
    if len(sheaves) > cap:
        raise ResourceLimitError(f"{len(sheaves)} test sheaves exceed the cap {cap}")
    smooth_sets = enumerate_smooth_msets(m, bound)

    failures: list[str] = []
    omegas = [fiber_functor(m, f) for f in sheaves]

    hom_checked = 0
    for i, f1 in enumerate(sheaves):
        for j, f2 in enumerate(sheaves):
            homs = presheaf_hom(f1, f2)
            induced = []
            for phi in homs:
                induced.append(
                    tuple(sorted(omega_on_morphism(m, phi, omegas[i], omegas[j]).items()))
                )
            if len(set(induced)) != len(homs):
                failures.append(f"fiber functor not faithful between sheaf {i} and {j}")
            eq = {
                tuple(sorted(e.items()))
                for e in equivariant_maps(omegas[i], omegas[j])
            }
            if set(induced) != eq:
                failures.append(
                    f"hom sets differ from equivariant maps between sheaf {i} and {j}"
                )
            hom_checked += 1

    realized = 0
    for t in smooth_sets:
        ft = sheaf_from_smooth_set(m, t)
        sheaf_ok, _ = is_sheaf(ft, mode="equalizer")
        if not sheaf_ok:
            failures.append(f"fixed-point presheaf of a {len(t.carrier)}-point set is not a sheaf")
            continue
        if msets_isomorphic(fiber_functor(m, ft), t) is None:
            failures.append(
                f"smooth set with {len(t.carrier)} points is not recovered"
            )
        realized += 1

    sections_checked = 0
    for i, f in enumerate(sheaves):
        om = omegas[i]
        for x in sorted(m.k_groups):
            ix = m.grid.obj(x)
            classes = [om.class_of[(x, sec)] for sec in f.at(ix)]
            if len(set(classes)) != len(classes):
                failures.append(f"sections over {ix} do not inject into the fiber (sheaf {i})")
            fixed = {
                pt
                for pt in om.carrier
                if all(om.apply(k, pt) == pt for k in m.k_groups[x])
            }
            if set(classes) != fixed:
                failures.append(
                    f"sections over {ix} miss the fixed points (sheaf {i})"
                )
            sections_checked += 1

    return {
        "pass": not failures,
        "sheaves": len(sheaves),
        "smooth_sets": len(smooth_sets),
        "hom_pairs_checked": hom_checked,
        "smooth_sets_realized": realized,
        "fixed_point_checks": sections_checked,
        "failures": failures,
    }


# -- the point of the topos -----------------------------------------------------


def _map_name(assignment: dict[str, str]) -> str:
    return "map(" + ",".join(f"{k}>{v}" for k, v in sorted(assignment.items())) + ")"


def point_adjoint(
    m: GaloisMonoid, y_points, test_sheaves: list[Presheaf] | None = None
) -> tuple[Presheaf, dict]:
    """The right adjoint value on a finite set, with the adjunction report.

    Sections over X are set maps from the fiber of the representable at X
    into the given set; the report verifies sheafness, the adjunction
    cardinalities against the supplied test sheaves, and that the fiber
    functor reflects isomorphisms on that family.
    """
    y_points = tuple(y_points)
    s = m.site
    c = s.category
    omega_h = {x: fiber_functor(m, representable(s, x)) for x in c.objects}

    sections = {}
    maps_at: dict[str, list[dict[str, str]]] = {}
    for x in c.objects:
        carrier = omega_h[x].carrier
        assignments = [
            dict(zip(carrier, combo))
            for combo in itertools.product(y_points, repeat=len(carrier))
        ]
        if not carrier:
            assignments = [{}]
        maps_at[x] = assignments
        sections[x] = tuple(sorted(_map_name(a) for a in assignments))

    restrictions = {}
    for u in c.morphisms:
        if c.is_identity(u):
            continue
        x, ydst = c.src(u), c.dst(u)
        push = {}
        for cls in omega_h[x].carrier:
            node = min(
                (n for n, k in omega_h[x].class_of.items() if k == cls),
                key=lambda n: f"{n[0]}|{n[1]}",
            )
            w, sec = node
            push[cls] = omega_h[ydst].class_of[(w, c.compose(u, sec))]
        table = {}
        for a in maps_at[ydst]:
            precomposed = {cls: a[push[cls]] for cls in omega_h[x].carrier}
            table[_map_name(a)] = _map_name(precomposed)
        restrictions[u] = table

    f_star = Presheaf(s, sections, restrictions)

    report: dict = {"y_size": len(y_points)}
    ok_eq, wit_eq = is_sheaf(f_star, mode="equalizer")
    ok_gal, wit_gal = is_sheaf(f_star, mode="galois")
    report["is_sheaf"] = ok_eq and ok_gal
    report["sheaf_witness"] = wit_eq or wit_gal

    if test_sheaves is not None:
        adjunction = []
        for i, h in enumerate(test_sheaves):
            lhs = len(y_points) ** len(fiber_functor(m, h).carrier)
            rhs = len(presheaf_hom(h, f_star))
            adjunction.append({"sheaf": i, "maps_from_fiber": lhs, "homs_to_point": rhs})
        report["adjunction"] = adjunction
        report["adjunction_pass"] = all(
            e["maps_from_fiber"] == e["homs_to_point"] for e in adjunction
        )

        reflects = True
        for h1 in test_sheaves:
            om1 = fiber_functor(m, h1)
            for h2 in test_sheaves:
                om2 = fiber_functor(m, h2)
                for phi in presheaf_hom(h1, h2):
                    induced = omega_on_morphism(m, phi, om1, om2)
                    bij = (
                        len(set(induced.values())) == len(induced) == len(om2.carrier)
                    )
                    if bij != phi.is_bijective():
                        reflects = False
        report["reflects_isomorphisms"] = reflects
    return f_star, report
