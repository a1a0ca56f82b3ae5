"""Builders for the stock example sites.

* transitive group-action sites with the atomic topology, plus the
  subgroup-poset grid;
* the successor-shift site (finite window) with the full or the
  offset-zero basis;
* the cyclic span site whose morphisms are classes of subgroup spans.
"""
from __future__ import annotations

import itertools

from .cat import CatFunctor, FiniteCategory, Mor, identity_name, make_category
from .errors import InputError, ResourceLimitError
from .galois import GroupTable
from .grid import Grid
from .topology import ATopology, MorphismCollection
from .validation import Site, Window


# -- transitive group-action sites ---------------------------------------------


def subgroups(g: GroupTable) -> list[frozenset[str]]:
    """Every subgroup, by closure of generator subsets (|G| <= 24)."""
    found = {frozenset([g.unit])}
    frontier = [frozenset([g.unit])]
    while frontier:
        nxt = []
        for h in frontier:
            for a in g.elements:
                if a in h:
                    continue
                new = _close_subgroup(g, h | {a})
                if new not in found:
                    found.add(new)
                    nxt.append(new)
        frontier = nxt
    return sorted(found, key=lambda h: (len(h), sorted(h)))


def _close_subgroup(g: GroupTable, seed: frozenset[str]) -> frozenset[str]:
    out = set(seed)
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                c = g.op(a, b)
                if c not in out:
                    out.add(c)
                    changed = True
            if g.inv[a] not in out:
                out.add(g.inv[a])
                changed = True
    return frozenset(out)


def _conjugate(g: GroupTable, t: str, h: frozenset[str]) -> frozenset[str]:
    return frozenset(g.op(g.op(t, a), g.inv[t]) for a in h)


def subgroup_name(h: frozenset[str]) -> str:
    return "{" + ",".join(sorted(h)) + "}"


def build_gsets_site(group: GroupTable, cap: int = 24) -> tuple[Site, Grid]:
    """The site of transitive actions of a finite group with the atomic
    topology, together with the full subgroup-poset grid."""
    if len(group) > cap:
        raise ResourceLimitError(f"group order {len(group)} exceeds the cap {cap}")
    subs = subgroups(group)

    # conjugacy classes with least representatives, plus a conjugator each
    rep_of: dict[frozenset[str], frozenset[str]] = {}
    conjugator: dict[frozenset[str], str] = {}
    for h in subs:
        orbit = {}
        for t in group.elements:
            orbit.setdefault(_conjugate(group, t, h), t)
        rep = min(orbit, key=lambda k: (len(k), sorted(k)))
        rep_of[h] = rep
        # t with t·H·t^{-1} = rep, least
        conjugator[h] = min(t for t in group.elements if _conjugate(group, t, h) == rep)
    reps = sorted(set(rep_of.values()), key=lambda k: (len(k), sorted(k)))

    obj_name = {h: f"G/{subgroup_name(h)}" for h in reps}
    objects = [obj_name[h] for h in reps]

    def coset(a: str, k: frozenset[str]) -> frozenset[str]:
        return frozenset(group.op(a, b) for b in k)

    def mor_name(h, k, cs: frozenset[str]) -> str:
        if h == k and cs == k:
            return identity_name(obj_name[h])
        return f"c[{min(cs)}]:{obj_name[h]}>{obj_name[k]}"

    mors = []
    mor_data = {}  # name -> (H, K, coset)
    for h in reps:
        for k in reps:
            seen = set()
            for a in group.elements:
                cs = coset(a, k)
                if cs in seen:
                    continue
                seen.add(cs)
                if all(group.op(group.op(group.inv[a], x), a) in k for x in h):
                    name = mor_name(h, k, cs)
                    mor_data[name] = (h, k, cs)
                    if not (h == k and cs == k):
                        mors.append((name, obj_name[h], obj_name[k]))

    def compose_fn(gname: str, fname: str) -> str:
        h1, k1, cs1 = mor_data[fname]
        k1b, l1, cs2 = mor_data[gname]
        a, b = min(cs1), min(cs2)
        return mor_name(h1, l1, coset(group.op(a, b), l1))

    cat = make_category(objects, mors, compose_fn)
    for x in cat.objects:
        mor_data.setdefault(
            identity_name(x),
            next(
                (h, h, h)
                for h in reps
                if obj_name[h] == x
            ),
        )
    topo = ATopology(cat, MorphismCollection.all_morphisms(cat))
    site = Site(category=cat, topology=topo, name=f"gsets[{len(group)}]")

    # grid: the poset of all subgroups mapped onto conjugacy representatives
    grid_objs = {h: f"H{subgroup_name(h)}" for h in subs}
    grid_mors = []
    for h1 in subs:
        for h2 in subs:
            if h1 != h2 and h1 <= h2:
                grid_mors.append((f"le:{grid_objs[h1]}>{grid_objs[h2]}", grid_objs[h1], grid_objs[h2]))
    poset = make_category(
        list(grid_objs.values()),
        grid_mors,
        lambda gname, fname: _poset_compose(gname, fname),
    )

    obj_map = {grid_objs[h]: obj_name[rep_of[h]] for h in subs}
    mor_map = {}
    for h in subs:
        mor_map[identity_name(grid_objs[h])] = cat.identity[obj_map[grid_objs[h]]]
    for h1 in subs:
        for h2 in subs:
            if h1 != h2 and h1 <= h2:
                a = group.op(conjugator[h1], group.inv[conjugator[h2]])
                target = mor_name(rep_of[h1], rep_of[h2], coset(a, rep_of[h2]))
                mor_map[f"le:{grid_objs[h1]}>{grid_objs[h2]}"] = target
    iota = CatFunctor(source=poset, target=cat, obj_map=obj_map, mor_map=mor_map)
    return site, Grid(poset=poset, iota=iota)


def _poset_compose(gname: str, fname: str) -> str:
    lo = fname.split(">")[0][3:] if fname.startswith("le:") else None
    hi = gname.split(">")[1]
    return f"le:{lo}>{hi}"


# -- the successor-shift window --------------------------------------------------


def _succ_obj(k: int, width: int) -> str:
    return f"s{k:0{width}d}"


def build_successor_site(n: int, plus: bool = False) -> Site:
    """Window of the shift site: objects 0..n, morphisms are offset maps.

    A morphism m -> k exists for each offset 0..m-k, so hom sizes follow
    max(0, m-k+1); the offset-zero morphisms form the restricted basis.
    Window metadata marks the truncation.
    """
    if n < 1:
        raise InputError("window size must be at least 1")
    width = len(str(n))
    objects = [_succ_obj(k, width) for k in range(n + 1)]

    def name(m: int, k: int, c: int) -> str:
        if m == k and c == 0:
            return identity_name(_succ_obj(m, width))
        return f"sh{c}:{_succ_obj(m, width)}>{_succ_obj(k, width)}"

    mors = []
    data = {}
    for m in range(n + 1):
        for k in range(m + 1):
            for c in range(m - k + 1):
                nm = name(m, k, c)
                data[nm] = (m, k, c)
                if not (m == k and c == 0):
                    mors.append((nm, _succ_obj(m, width), _succ_obj(k, width)))

    def compose_fn(gname: str, fname: str) -> str:
        m, k, c1 = data[fname]
        _, j, c2 = data[gname]
        return name(m, j, c1 + c2)

    cat = make_category(objects, mors, compose_fn)
    for m in range(n + 1):
        data.setdefault(identity_name(_succ_obj(m, width)), (m, m, 0))

    if plus:
        basis = frozenset(nm for nm, (m, k, c) in data.items() if c == 0)
    else:
        basis = frozenset(data)
    topo = ATopology(cat, MorphismCollection(cat, basis), check=False)
    window = Window(
        rank={_succ_obj(k, width): k for k in range(n + 1)}, lo=0, hi=n
    )
    return Site(
        category=cat,
        topology=topo,
        window=window,
        name=f"succ[{n}]{'+' if plus else ''}",
    )


def successor_grid(n: int, plus: bool = False) -> Grid:
    """The interval grid over the shift window: objects are integer
    intervals (nonnegative left ends in the plus flavor), arrows reverse
    inclusion, and the structure functor takes lengths."""
    site = build_successor_site(n, plus=plus)
    cat = site.category
    width = len(str(n))
    lo_min = 0 if plus else -n
    intervals = [
        (a, b)
        for a in range(lo_min, n + 1)
        for b in range(a, min(a + n, n) + 1)
        if b - a <= n and b <= n and (not plus or a >= 0)
    ]

    def iname(iv):
        return f"iv[{iv[0]},{iv[1]}]"

    objs = [iname(iv) for iv in intervals]
    mors = []
    for iv1 in intervals:
        for iv2 in intervals:
            if iv1 != iv2 and iv1[0] <= iv2[0] and iv2[1] <= iv1[1]:
                mors.append((f"le:{iname(iv1)}>{iname(iv2)}", iname(iv1), iname(iv2)))
    poset = make_category(objs, mors, _poset_compose)

    def obj_of(iv):
        return _succ_obj(iv[1] - iv[0], width)

    obj_map = {iname(iv): obj_of(iv) for iv in intervals}
    mor_map = {}
    for iv in intervals:
        mor_map[identity_name(iname(iv))] = cat.identity[obj_of(iv)]
    for iv1 in intervals:
        for iv2 in intervals:
            if iv1 != iv2 and iv1[0] <= iv2[0] and iv2[1] <= iv1[1]:
                offset = iv2[0] - iv1[0]
                m, k = iv1[1] - iv1[0], iv2[1] - iv2[0]
                nm = (
                    cat.identity[_succ_obj(m, width)]
                    if (m == k and offset == 0)
                    else f"sh{offset}:{_succ_obj(m, width)}>{_succ_obj(k, width)}"
                )
                mor_map[f"le:{iname(iv1)}>{iname(iv2)}"] = nm
    iota = CatFunctor(source=poset, target=cat, obj_map=obj_map, mor_map=mor_map)
    return Grid(poset=poset, iota=iota)


# -- the cyclic span site ---------------------------------------------------------


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def build_cyclic_span_site(modulus: int) -> Site:
    """Objects are cyclic groups of each divisor order; a morphism m -> n
    is a subgroup of order d (a multiple of n dividing m) together with a
    surjection onto the target, encoded (d, a) with a a unit mod n.

    Composition pulls spans back: (d2,a2)∘(d1,a1) = (d1·d2/n, a1·a2).
    """
    if modulus < 1 or modulus > 64:
        raise InputError("modulus must be between 1 and 64")
    ns = divisors(modulus)
    objects = [f"Z{n}" for n in ns]

    def name(m: int, n: int, d: int, a: int) -> str:
        if m == n and d == m and a == 1 % m:
            return identity_name(f"Z{m}")
        return f"sp[d{d},a{a}]:Z{m}>Z{n}"

    mors = []
    data = {}
    for m in ns:
        for n in ns:
            for d in divisors(m):
                if d % n != 0:
                    continue
                for a in range(n):
                    if _gcd(a, n) != 1:
                        continue
                    nm = name(m, n, d, a)
                    data[nm] = (m, n, d, a)
                    if not (m == n and d == m and a == 1 % m):
                        mors.append((nm, f"Z{m}", f"Z{n}"))

    def compose_fn(gname: str, fname: str) -> str:
        m, n, d1, a1 = data[fname]
        _, p, d2, a2 = data[gname]
        return name(m, p, d1 * d2 // n, (a1 * a2) % p)

    cat = make_category(objects, mors, compose_fn)
    for m in ns:
        data.setdefault(identity_name(f"Z{m}"), (m, m, m, 1 % m))

    basis = frozenset(nm for nm, (m, n, d, a) in data.items() if d == m)
    topo = ATopology(cat, MorphismCollection(cat, basis), check=False)
    window = Window(rank={f"Z{n}": n for n in ns}, lo=1, hi=modulus)
    return Site(category=cat, topology=topo, window=window, name=f"cycspan[{modulus}]")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def span_hom_count(m: int, n: int) -> int:
    """Closed form for the span hom sizes: units of the target times the
    number of intermediate orders."""
    phi = sum(1 for a in range(n) if _gcd(a, n) == 1) if n > 1 else 1
    mult = sum(1 for d in divisors(m) if d % n == 0)
    return phi * mult
