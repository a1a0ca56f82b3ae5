"""Finite categories given by explicit composition tables.

Everything downstream (topologies, coverings, grids) works over these
structures, so the conventions are fixed here once:

* ``compose(g, f)`` means "g after f" and is defined exactly when
  ``dst(f) == src(g)``.  Stored table entries are keyed ``(g, f)``.
* identity morphisms carry the reserved name ``id:<object>``;
* all enumerations run in lexicographic order of ids, so every search,
  witness, and representative choice is reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError
from .report import ValidationReport


def identity_name(obj: str) -> str:
    return f"id:{obj}"


@dataclass(frozen=True, order=True)
class Mor:
    """A named morphism with its endpoints."""

    name: str
    src: str
    dst: str


class FiniteCategory:
    """A finite category as plain data.

    The constructor only checks structural integrity (unique ids, endpoints
    exist); the categorical laws are checked separately by
    :func:`validate_category` so that law-violating tables remain
    representable and reportable.
    """

    def __init__(self, objects, morphisms, identity, composition):
        objs = list(objects)
        if len(set(objs)) != len(objs):
            raise InputError("duplicate object ids")
        self.objects: tuple[str, ...] = tuple(sorted(objs))
        obj_set = set(self.objects)

        mors = [m if isinstance(m, Mor) else Mor(*m) for m in morphisms]
        names = [m.name for m in mors]
        if len(set(names)) != len(names):
            raise InputError("duplicate morphism ids")
        for m in mors:
            if m.src not in obj_set or m.dst not in obj_set:
                raise InputError(f"morphism {m.name} has unknown endpoint")
        self._mor: dict[str, Mor] = {m.name: m for m in sorted(mors)}

        self.identity: dict[str, str] = dict(identity)
        for obj, mid in self.identity.items():
            if obj not in obj_set or mid not in self._mor:
                raise InputError(f"identity entry {obj}->{mid} dangling")
        for obj in self.objects:
            if obj not in self.identity:
                raise InputError(f"object {obj} lacks an identity morphism")

        self.composition: dict[tuple[str, str], str] = {}
        for (g, f), h in composition.items():
            if g not in self._mor or f not in self._mor or h not in self._mor:
                raise InputError(f"composition entry ({g},{f})->{h} dangling")
            self.composition[(g, f)] = h

        self._hom: dict[tuple[str, str], list[str]] = {}
        self._into: dict[str, list[str]] = {x: [] for x in self.objects}
        self._out_of: dict[str, list[str]] = {x: [] for x in self.objects}
        for name, m in self._mor.items():
            self._hom.setdefault((m.src, m.dst), []).append(name)
            self._into[m.dst].append(name)
            self._out_of[m.src].append(name)
        self._inverse: dict[str, str] | None = None

    # -- basic accessors -------------------------------------------------

    @property
    def morphisms(self) -> tuple[str, ...]:
        return tuple(self._mor)

    def src(self, f: str) -> str:
        return self._mor[f].src

    def dst(self, f: str) -> str:
        return self._mor[f].dst

    def has_morphism(self, f: str) -> bool:
        return f in self._mor

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return tuple(self._hom.get((x, y), ()))

    def into(self, x: str) -> tuple[str, ...]:
        return tuple(self._into[x])

    def out_of(self, x: str) -> tuple[str, ...]:
        return tuple(self._out_of[x])

    def is_identity(self, f: str) -> bool:
        return self.identity.get(self.src(f)) == f and self.src(f) == self.dst(f)

    def compose(self, g: str, f: str) -> str:
        """g after f; raises InputError when the pair is not composable."""
        if self.dst(f) != self.src(g):
            raise InputError(f"morphisms {g} after {f} are not composable")
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise InputError(f"composition table lacks entry ({g},{f})") from None

    def compose_many(self, *fs: str) -> str:
        """Compose a chain listed outermost-first: compose_many(h,g,f) = h∘g∘f."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    # -- isomorphisms ----------------------------------------------------

    def _inverses(self) -> dict[str, str]:
        if self._inverse is None:
            inv: dict[str, str] = {}
            for f in self._mor:
                x, y = self.src(f), self.dst(f)
                for g in self.hom(y, x):
                    if (
                        self.composition.get((g, f)) == self.identity[x]
                        and self.composition.get((f, g)) == self.identity[y]
                    ):
                        inv[f] = g
                        break
            self._inverse = inv
        return self._inverse

    def inverse(self, f: str) -> str | None:
        return self._inverses().get(f)

    def is_iso(self, f: str) -> bool:
        return f in self._inverses()

    def isos(self, x: str, y: str) -> tuple[str, ...]:
        return tuple(f for f in self.hom(x, y) if self.is_iso(f))

    def composable_pairs(self):
        """All (g, f) with dst(f) == src(g), in lexicographic order."""
        for f in self._mor:
            for g in self._out_of[self.dst(f)]:
                yield g, f

    def to_json(self) -> dict:
        """Category JSON with identities implicit (see the file schema)."""
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"id": m.name, "src": m.src, "dst": m.dst}
                for m in self._mor.values()
                if not self.is_identity(m.name)
            ],
            "composition": sorted(
                [f, g, h]
                for (g, f), h in self.composition.items()
                if not (self.is_identity(g) or self.is_identity(f))
            ),
        }


def make_category(objects, morphisms, compose_fn) -> FiniteCategory:
    """Build a category from non-identity morphism data and a composition rule.

    ``morphisms`` lists (name, src, dst) for the non-identity morphisms;
    identities are created automatically.  ``compose_fn(g, f)`` must return
    the name of g∘f for every composable pair of non-identity morphisms.
    """
    objects = sorted(objects)
    mors = [Mor(*m) for m in morphisms]
    idname = {x: identity_name(x) for x in objects}
    all_mors = [Mor(idname[x], x, x) for x in objects] + mors
    by_name = {m.name: m for m in all_mors}
    comp: dict[tuple[str, str], str] = {}
    for f in all_mors:
        for g in all_mors:
            if f.dst != g.src:
                continue
            if g.name == idname.get(g.src):
                comp[(g.name, f.name)] = f.name
            elif f.name == idname.get(f.src):
                comp[(g.name, f.name)] = g.name
            else:
                h = compose_fn(g.name, f.name)
                if h not in by_name:
                    raise InputError(f"composition rule produced unknown id {h}")
                comp[(g.name, f.name)] = h
    return FiniteCategory(objects, all_mors, idname, comp)


@dataclass
class CatFunctor:
    """A functor between finite categories, stored as two lookup tables."""

    source: FiniteCategory
    target: FiniteCategory
    obj_map: dict[str, str]
    mor_map: dict[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_mor(self, f: str) -> str:
        return self.mor_map[f]

    def validate(self) -> list[str]:
        """Return human-readable violations; empty means a genuine functor."""
        bad = []
        for x in self.source.objects:
            if x not in self.obj_map or self.obj_map[x] not in self.target.objects:
                bad.append(f"object {x} not mapped into the target")
        for f in self.source.morphisms:
            if f not in self.mor_map or not self.target.has_morphism(self.mor_map[f]):
                bad.append(f"morphism {f} not mapped into the target")
                continue
            ff = self.mor_map[f]
            if self.target.src(ff) != self.obj_map.get(self.source.src(f)):
                bad.append(f"{f}: source not preserved")
            if self.target.dst(ff) != self.obj_map.get(self.source.dst(f)):
                bad.append(f"{f}: target not preserved")
        for x in self.source.objects:
            idx = self.source.identity[x]
            if self.mor_map.get(idx) != self.target.identity.get(self.obj_map.get(x)):
                bad.append(f"identity of {x} not preserved")
        for g, f in self.source.composable_pairs():
            h = self.source.composition.get((g, f))
            if h is None or not all(m in self.mor_map for m in (g, f, h)):
                continue
            lhs = self.target.composition.get((self.mor_map[g], self.mor_map[f]))
            if lhs != self.mor_map[h]:
                bad.append(f"composition ({g},{f}) not preserved")
        return bad


@dataclass
class NaturalIso:
    """A natural isomorphism between two parallel functors.

    ``components[x]`` is a morphism id in the common target category, an
    isomorphism from_functor(x) -> to_functor(x).
    """

    from_functor: CatFunctor
    to_functor: CatFunctor
    components: dict[str, str]

    def validate(self) -> list[str]:
        bad = []
        src = self.from_functor.source
        tgt = self.from_functor.target
        usable = set()
        for x in src.objects:
            comp = self.components.get(x)
            if comp is None or not tgt.has_morphism(comp):
                bad.append(f"component at {x} missing")
                continue
            if tgt.src(comp) != self.from_functor.on_obj(x) or tgt.dst(
                comp
            ) != self.to_functor.on_obj(x):
                bad.append(f"component at {x} has wrong endpoints")
                continue
            if not tgt.is_iso(comp):
                bad.append(f"component at {x} is not an isomorphism")
            usable.add(x)
        for f in src.morphisms:
            x, y = src.src(f), src.dst(f)
            if x not in usable or y not in usable:
                continue
            lhs = tgt.compose(self.components[y], self.from_functor.on_mor(f))
            rhs = tgt.compose(self.to_functor.on_mor(f), self.components[x])
            if lhs != rhs:
                bad.append(f"naturality fails at {f}")
        return bad


# -- validation ----------------------------------------------------------


def validate_category(c: FiniteCategory) -> ValidationReport:
    """Brute-force check of the category laws; lists every violation."""
    rep = ValidationReport(level="category")
    for x in c.objects:
        idx = c.identity[x]
        if c.src(idx) != x or c.dst(idx) != x:
            rep.add("identity-endpoints", (x, idx), f"identity of {x} is not an endomorphism")

    defined = set(c.composition)
    composable = set(c.composable_pairs())
    for pair in sorted(defined - composable):
        rep.add("composition-domain", pair, f"entry {pair} is not a composable pair")
    for pair in sorted(composable - defined):
        rep.add("composition-total", pair, f"composable pair {pair} has no composite")

    for (g, f), h in sorted(c.composition.items()):
        if (g, f) not in composable:
            continue
        if c.src(h) != c.src(f) or c.dst(h) != c.dst(g):
            rep.add("composite-endpoints", (f, g, h), f"{h} has wrong endpoints for {g}∘{f}")

    for f in c.morphisms:
        left = c.composition.get((c.identity[c.dst(f)], f))
        if left != f:
            rep.add("identity-law", (f,), f"id∘{f} = {left} != {f}")
        right = c.composition.get((f, c.identity[c.src(f)]))
        if right != f:
            rep.add("identity-law", (f,), f"{f}∘id = {right} != {f}")

    for f in c.morphisms:
        for g in c.out_of(c.dst(f)):
            gf = c.composition.get((g, f))
            if gf is None:
                continue
            for h in c.out_of(c.dst(g)):
                hg = c.composition.get((h, g))
                lhs = c.composition.get((h, gf)) if gf else None
                rhs = c.composition.get((hg, f)) if hg else None
                if lhs != rhs:
                    rep.add(
                        "associativity",
                        (f, g, h),
                        f"h∘(g∘f) = {lhs} but (h∘g)∘f = {rhs}",
                    )
    return rep


# -- elementary categorical predicates ------------------------------------


def epimorphisms(c: FiniteCategory) -> frozenset[str]:
    """All morphisms f with: g∘f = h∘f implies g = h."""
    epis = set()
    for f in c.morphisms:
        y = c.dst(f)
        ok = True
        for g, h in itertools.combinations(c.out_of(y), 2):
            if c.dst(g) != c.dst(h):
                continue
            if c.compose(g, f) == c.compose(h, f):
                ok = False
                break
        if ok:
            epis.add(f)
    return frozenset(epis)


def is_e_category(c: FiniteCategory) -> bool:
    """True when every morphism is an epimorphism."""
    return len(epimorphisms(c)) == len(c.morphisms)


def is_lambda_connected(c: FiniteCategory) -> tuple[bool, tuple[str, str] | None]:
    """Every two objects admit a common source; returns the least violating pair."""
    if not c.objects:
        raise InputError("empty category")
    for x, y in itertools.product(c.objects, repeat=2):
        if not any(c.hom(z, x) and c.hom(z, y) for z in c.objects):
            return False, (x, y)
    return True, None


def is_semi_cofiltered(c: FiniteCategory) -> tuple[bool, tuple[str, str] | None]:
    """Every cospan f1: Y1 -> X <- Y2 :f2 completes to a commuting square."""
    for f1 in c.morphisms:
        x = c.dst(f1)
        for f2 in c.into(x):
            if not _ore_square_exists(c, f1, f2):
                return False, (f1, f2)
    return True, None


def _ore_square_exists(c: FiniteCategory, f1: str, f2: str, t: frozenset | None = None) -> bool:
    """Is there g1: Z->src(f1), g2: Z->src(f2) with f1∘g1 = f2∘g2 (g2 in t)?"""
    y1, y2 = c.src(f1), c.src(f2)
    for z in c.objects:
        for g1 in c.hom(z, y1):
            lhs = c.compose(f1, g1)
            for g2 in c.hom(z, y2):
                if t is not None and g2 not in t:
                    continue
                if lhs == c.compose(f2, g2):
                    return True
    return False


# -- slice and coslice ----------------------------------------------------


def slice_category(
    c: FiniteCategory, x: str, direction: str = "over"
) -> tuple[FiniteCategory, CatFunctor]:
    """The over- or undercategory at x, plus the forgetful functor.

    Objects are named by the underlying morphism ids.  A slice morphism id
    encodes the mediating morphism and both endpoints, since the same
    mediating morphism can connect several slice objects.
    """
    if x not in c.objects:
        raise InputError(f"unknown object {x}")
    if direction not in ("over", "under"):
        raise InputError("direction must be 'over' or 'under'")
    over = direction == "over"
    objs = list(c.into(x) if over else c.out_of(x))

    mors = []
    mor_to_h = {}
    for f1, f2 in itertools.product(objs, repeat=2):
        if over:
            carriers = [h for h in c.hom(c.src(f1), c.src(f2)) if c.compose(f2, h) == f1]
        else:
            carriers = [h for h in c.hom(c.dst(f1), c.dst(f2)) if c.compose(h, f1) == f2]
        for h in carriers:
            name = f"{h}[{f1}>{f2}]"
            mors.append(Mor(name, f1, f2))
            mor_to_h[name] = h

    identity = {}
    for f in objs:
        carrier = c.identity[c.src(f) if over else c.dst(f)]
        identity[f] = f"{carrier}[{f}>{f}]"

    comp = {}
    for m1 in mors:
        for m2 in mors:
            if m1.dst != m2.src:
                continue
            h = c.compose(mor_to_h[m2.name], mor_to_h[m1.name])
            comp[(m2.name, m1.name)] = f"{h}[{m1.src}>{m2.dst}]"

    cat = FiniteCategory(objs, mors, identity, comp)
    forget = CatFunctor(
        source=cat,
        target=c,
        obj_map={f: (c.src(f) if over else c.dst(f)) for f in objs},
        mor_map={m.name: mor_to_h[m.name] for m in mors},
    )
    return cat, forget


# -- thin categories ------------------------------------------------------


def is_thin(c: FiniteCategory) -> tuple[bool, tuple[str, str] | None]:
    for x, y in itertools.product(c.objects, repeat=2):
        if len(c.hom(x, y)) > 1:
            return False, (x, y)
    return True, None


def thin_iso_classes(c: FiniteCategory) -> dict[str, str]:
    """Map each object of a thin category to its least isomorphic object."""
    rep = {}
    for x in c.objects:
        cls = [y for y in c.objects if c.hom(x, y) and c.hom(y, x)]
        rep[x] = min(cls) if cls else x
    return rep


def poset_skeleton(c: FiniteCategory) -> tuple[FiniteCategory, CatFunctor]:
    """Collapse a thin category onto a skeletal poset.

    Representatives are the lexicographically least object of each
    isomorphism class; the returned functor is the collapse (a quasi-inverse
    to the inclusion of the skeleton).
    """
    if not c.objects:
        raise InputError("empty category")
    thin, offender = is_thin(c)
    if not thin:
        raise InputError(f"category is not thin: Hom{offender} has several morphisms")
    rep = thin_iso_classes(c)
    objs = sorted(set(rep.values()))
    mors = []
    for a, b in itertools.product(objs, repeat=2):
        if a != b and c.hom(a, b):
            mors.append(Mor(f"le:{a}>{b}", a, b))
    identity = {a: identity_name(a) for a in objs}
    all_mors = [Mor(identity[a], a, a) for a in objs] + mors
    comp = {}
    by_pair = {(m.src, m.dst): m.name for m in all_mors}
    for m1 in all_mors:
        for m2 in all_mors:
            if m1.dst == m2.src:
                comp[(m2.name, m1.name)] = by_pair[(m1.src, m2.dst)]
    skel = FiniteCategory(objs, all_mors, identity, comp)

    obj_map = dict(rep)
    mor_map = {}
    for f in c.morphisms:
        a, b = rep[c.src(f)], rep[c.dst(f)]
        mor_map[f] = by_pair[(a, b)]
    collapse = CatFunctor(source=c, target=skel, obj_map=obj_map, mor_map=mor_map)
    return skel, collapse


# -- quotient objects ------------------------------------------------------


def _check_subgroup(c: FiniteCategory, y: str, g_subgroup) -> frozenset[str]:
    g = frozenset(g_subgroup)
    for f in g:
        if not c.has_morphism(f) or c.src(f) != y or c.dst(f) != y:
            raise InputError(f"{f} is not an endomorphism of {y}")
        if not c.is_iso(f):
            raise InputError(f"{f} is not an automorphism of {y}")
    if c.identity[y] not in g:
        raise InputError("subgroup lacks the identity")
    for a in g:
        if c.inverse(a) not in g:
            raise InputError(f"subgroup lacks the inverse of {a}")
        for b in g:
            if c.compose(a, b) not in g:
                raise InputError(f"subgroup not closed under composition at ({a},{b})")
    return g


def quotient_object(
    c: FiniteCategory, y: str, g_subgroup
) -> tuple[str, str] | None:
    """Find (X, can: Y->X) co-representing the G-invariant hom functor.

    Verified by exhaustive check of the universal property over every object
    Z; returns None when no quotient exists in the category.
    """
    g = _check_subgroup(c, y, g_subgroup)
    candidates = [
        (x, can)
        for x in c.objects
        for can in c.hom(y, x)
        if all(c.compose(can, a) == can for a in g)
    ]
    # identities first, then lexicographic: quotients are unique only up to
    # isomorphism, and the canonical representative is the identity when
    # the group is trivial
    candidates.sort(key=lambda t: (t[0], 0 if c.is_identity(t[1]) else 1, t[1]))
    for x, can in candidates:
        if _is_universal_quotient(c, y, g, x, can):
            return x, can
    return None


def _is_universal_quotient(c, y, g, x, can) -> bool:
    for z in c.objects:
        invariant = [
            f for f in c.hom(y, z) if all(c.compose(f, a) == f for a in g)
        ]
        image = [c.compose(h, can) for h in c.hom(x, z)]
        if len(set(image)) != len(image):  # injectivity of -∘can
            return False
        if set(image) != set(invariant):
            return False
    return True
