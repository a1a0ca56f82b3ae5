"""Covering collections, sieves, and the topologies they generate.

A covering basis is a morphism collection satisfying three closure
conditions (identities, composition, and the right Ore condition with the
basis-side leg in the collection).  Such a basis generates a topology whose
covering sieves are exactly the sieves containing a basis morphism; that is
the only kind of topology this library represents.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cat import FiniteCategory, _ore_square_exists
from .errors import InputError, ResourceLimitError
from .report import ValidationReport


@dataclass(frozen=True)
class MorphismCollection:
    category: FiniteCategory
    members: frozenset[str]

    def __post_init__(self):
        for f in self.members:
            if not self.category.has_morphism(f):
                raise InputError(f"collection member {f} is not a morphism")

    def __contains__(self, f: str) -> bool:
        return f in self.members

    @classmethod
    def all_morphisms(cls, c: FiniteCategory) -> "MorphismCollection":
        return cls(c, frozenset(c.morphisms))

    @classmethod
    def identities(cls, c: FiniteCategory) -> "MorphismCollection":
        return cls(c, frozenset(c.identity.values()))


@dataclass(frozen=True)
class Sieve:
    """A set of morphisms into a fixed apex, closed under precomposition."""

    category: FiniteCategory
    apex: str
    members: frozenset[str]

    def __post_init__(self):
        for f in self.members:
            if self.category.dst(f) != self.apex:
                raise InputError(f"sieve member {f} does not target {self.apex}")

    def __contains__(self, f: str) -> bool:
        return f in self.members

    def is_closed(self) -> bool:
        c = self.category
        for f in self.members:
            for g in c.into(c.src(f)):
                if c.compose(f, g) not in self.members:
                    return False
        return True


@dataclass(frozen=True)
class ATopology:
    """A topology presented by a covering basis.

    The basis is checked semi-localizing at construction unless ``check``
    is disabled, as for finite windows of infinite sites where completion
    squares may fall outside the window (the site validators then report
    those softly).
    """

    category: FiniteCategory
    basis: MorphismCollection
    check: bool = True

    def __post_init__(self):
        if not self.check:
            return
        ok, cond, witness = is_semi_localizing(self.basis)
        if not ok:
            raise InputError(
                f"basis is not semi-localizing: condition ({cond}) fails at {witness}"
            )


def is_semi_localizing(t: MorphismCollection) -> tuple[bool, int | None, tuple | None]:
    """Check the three basis conditions; returns (ok, condition, witness).

    (1) identities belong, (2) closed under composition, (3) every cospan
    with basis-side left leg completes to a square whose second leg is in
    the collection.
    """
    c = t.category
    for x in c.objects:
        if c.identity[x] not in t:
            return False, 1, (x,)
    for g, f in c.composable_pairs():
        if f in t and g in t and c.compose(g, f) not in t:
            return False, 2, (f, g)
    for f1 in sorted(t.members):
        x = c.dst(f1)
        for f2 in c.into(x):
            if not _ore_square_exists(c, f1, f2, t.members):
                return False, 3, (f1, f2)
    return True, None, None


def saturate(t: MorphismCollection) -> MorphismCollection:
    """All f admitting g with f∘g in the collection."""
    c = t.category
    members = set()
    for f in c.morphisms:
        y = c.src(f)
        if any(c.compose(f, g) in t for g in c.into(y)):
            members.add(f)
    return MorphismCollection(c, frozenset(members))


def sieve_generated(c: FiniteCategory, apex: str, generators) -> Sieve:
    """The smallest sieve on the apex containing the given morphisms."""
    gens = list(generators)
    for f in gens:
        if c.dst(f) != apex:
            raise InputError(f"generator {f} does not target {apex}")
    members = set()
    for f in gens:
        members.add(f)
        for g in c.into(c.src(f)):
            members.add(c.compose(f, g))
    return Sieve(c, apex, frozenset(members))


def principal_sieve(c: FiniteCategory, f: str) -> Sieve:
    return sieve_generated(c, c.dst(f), [f])


def maximal_sieve(c: FiniteCategory, apex: str) -> Sieve:
    return Sieve(c, apex, frozenset(c.into(apex)))


def pullback_sieve(r: Sieve, f: str) -> Sieve:
    """The sieve of all g with f∘g in r, on the source of f."""
    c = r.category
    if c.dst(f) != r.apex:
        raise InputError(f"{f} does not target the apex of the sieve")
    y = c.src(f)
    members = frozenset(g for g in c.into(y) if c.compose(f, g) in r)
    return Sieve(c, y, members)


def in_topology(j: ATopology, r: Sieve) -> bool:
    """A sieve covers iff it contains a basis morphism."""
    return any(f in j.basis for f in r.members)


def covering_collection(j: ATopology) -> MorphismCollection:
    """All f whose principal sieve covers; equals the saturated basis."""
    c = j.category
    members = frozenset(
        f for f in c.morphisms if in_topology(j, principal_sieve(c, f))
    )
    return MorphismCollection(c, members)


# -- brute-force topology axioms -------------------------------------------


def all_sieves(c: FiniteCategory, apex: str, cap: int = 20) -> list[Sieve]:
    """Every distinct sieve on the apex, from closures of incoming subsets."""
    incoming = c.into(apex)
    if len(incoming) > cap:
        raise ResourceLimitError(
            f"{len(incoming)} incoming morphisms at {apex} exceeds the cap {cap}"
        )
    seen = {}
    for k in range(len(incoming) + 1):
        for subset in itertools.combinations(incoming, k):
            s = sieve_generated(c, apex, subset)
            seen[s.members] = s
    return [seen[m] for m in sorted(seen, key=sorted)]


def verify_topology_axioms(j: ATopology, cap: int = 20) -> ValidationReport:
    """Check the three covering-sieve axioms exhaustively.

    Above the cap on incoming-morphism counts the sieve lattice is not
    enumerated; the axioms are then checked on all principal sieves and
    their pullbacks only, and the report is labelled "principal-only".
    """
    c = j.category
    rep = ValidationReport(level="topology")
    sieves: dict[str, list[Sieve]] = {}
    principal_only = False
    for x in c.objects:
        try:
            sieves[x] = all_sieves(c, x, cap=cap)
        except ResourceLimitError:
            principal_only = True
            seen = {}
            for f in c.into(x):
                s = principal_sieve(c, f)
                seen[s.members] = s
            seen.setdefault(frozenset(c.into(x)), maximal_sieve(c, x))
            sieves[x] = list(seen.values())
    if principal_only:
        rep.notes.append("principal-only")

    for x in c.objects:
        if not in_topology(j, maximal_sieve(c, x)):
            rep.add("axiom-1", (x,), f"maximal sieve on {x} does not cover")

    for x in c.objects:
        covering = [r for r in sieves[x] if in_topology(j, r)]
        for r in covering:
            for f in c.into(x):
                if not in_topology(j, pullback_sieve(r, f)):
                    rep.add(
                        "axiom-2",
                        (x, f, tuple(sorted(r.members))),
                        f"pullback of a covering sieve along {f} does not cover",
                    )
        for r in covering:
            for r2 in sieves[x]:
                if in_topology(j, r2):
                    continue
                if all(
                    in_topology(j, pullback_sieve(r2, f)) for f in r.members
                ):
                    rep.add(
                        "axiom-3",
                        (x, tuple(sorted(r.members)), tuple(sorted(r2.members))),
                        "locally covering sieve does not cover",
                    )
    return rep
