"""Batch command-line front end.

Commands read a site document from --in (default stdin) and write JSON to
--out (default stdout).  Exit codes: 0 pass, 1 violation found, 2 input
error, 3 only window-unverified conditions remain.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import io as sio
from .cat import validate_category
from .errors import InputError, PreconditionError, ResourceLimitError, SitoformError
from .galois import GroupTable, enough_galois_coverings, galois_coverings, is_galois_covering
from .grid import build_grid, build_pregrid, validate_grid, validate_pregrid
from .monoid import compute_monoid, coset_neighborhood_basis
from .sheaves import enumerate_sheaves, is_sheaf, presheaf_hom, sheafify, validate_presheaf
from .smooth import fiber_functor, point_adjoint, verify_equivalence
from .topology import is_semi_localizing, verify_topology_axioms
from .validation import validate_b_site, validate_y_site
from .examples import build_cyclic_span_site, build_gsets_site, build_successor_site

PASS, VIOLATION, USAGE, UNVERIFIED_ONLY = 0, 1, 2, 3


def _read_doc(path: str) -> dict:
    data = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise InputError(f"input is not JSON: {e}") from None


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit(doc: dict, args) -> None:
    _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)


def _report_exit(rep) -> int:
    if not rep.passed:
        return VIOLATION
    if rep.unverified_only:
        return UNVERIFIED_ONLY
    return PASS


def _load_site(args):
    doc = _read_doc(getattr(args, "infile"))
    site, grid, presheaves = sio.site_from_json(doc)
    return doc, site, grid, presheaves


def _need_grid(doc, site, grid, seed=None):
    if grid is not None:
        return grid
    x0 = seed or min(site.category.objects)
    return build_grid(build_pregrid(site, x0), site)


# -- command handlers ---------------------------------------------------------


def cmd_check(args) -> int:
    doc, site, grid, _ = _load_site(args)
    t0 = time.time()
    if args.what == "category":
        rep = validate_category(site.category)
        if args.format == "dot":
            _write(sio.category_to_dot(site.category, site.name), args.out)
            return _report_exit(rep)
    elif args.what == "site":
        rep = validate_category(site.category)
        ok, cond, wit = is_semi_localizing(site.topology.basis)
        if not ok and not site.windowed:
            rep.add(f"semi-localizing-{cond}", wit, "basis violates a closure condition")
        if ok:
            axioms = verify_topology_axioms(site.topology)
            rep.extend(axioms)
    elif args.what == "ysite":
        rep = validate_y_site(site, margin=args.window_margin)
    else:
        raise InputError(f"unknown check target {args.what}")
    out = sio.report_document(
        f"check {args.what}",
        doc,
        rep.passed,
        report=rep.to_json(),
        timing_ms=int(1000 * (time.time() - t0)),
    )
    _emit(out, args)
    return _report_exit(rep)


def cmd_galois(args) -> int:
    doc, site, grid, _ = _load_site(args)
    c = site.category
    t0 = time.time()
    if args.what == "list":
        if args.format == "dot" and args.object:
            from .galois import galois_category_over

            gal = galois_category_over(site, args.object)
            _write(sio.category_to_dot(gal, f"coverings of {args.object}"), args.out)
            return PASS
        entries = {}
        for f in c.morphisms:
            gt = is_galois_covering(c, f)
            if gt is not None:
                entries[f] = len(gt)
        out = sio.report_document(
            "galois list",
            doc,
            True,
            galois_coverings={f: n for f, n in sorted(entries.items())},
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS
    if args.what == "enough":
        ok, witness = enough_galois_coverings(c, site.topology.basis)
        out = sio.report_document(
            "galois enough",
            doc,
            ok,
            witness=witness,
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS if ok else VIOLATION
    raise InputError(f"unknown galois subcommand {args.what}")


def cmd_sheaf(args) -> int:
    doc, site, grid, presheaves = _load_site(args)
    if args.presheaf not in presheaves:
        raise InputError(f"document has no presheaf named {args.presheaf!r}")
    f = presheaves[args.presheaf]
    t0 = time.time()
    if args.what == "check":
        rep = validate_presheaf(f)
        payload = {"report": rep.to_json()}
        if rep.passed:
            ok_eq, wit = is_sheaf(f, "equalizer")
            payload["is_sheaf"] = ok_eq
            payload["witness"] = wit
            passed = rep.passed and ok_eq
        else:
            passed = False
        out = sio.report_document(
            "sheaf check", doc, passed, timing_ms=int(1000 * (time.time() - t0)), **payload
        )
        _emit(out, args)
        return PASS if passed else VIOLATION
    if args.what == "sheafify":
        aF, unit = sheafify(f)
        out = sio.report_document(
            "sheaf sheafify",
            doc,
            True,
            sheafified=sio.presheaf_to_json(aF),
            unit={x: dict(sorted(t.items())) for x, t in unit.components.items()},
            unit_is_isomorphism=unit.is_bijective(),
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS
    if args.what == "hom":
        if args.presheaf2 not in presheaves:
            raise InputError(f"document has no presheaf named {args.presheaf2!r}")
        g = presheaves[args.presheaf2]
        homs = presheaf_hom(f, g)
        out = sio.report_document(
            "sheaf hom",
            doc,
            True,
            count=len(homs),
            morphisms=[
                {x: dict(sorted(t.items())) for x, t in h.components.items()}
                for h in homs
            ],
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS
    raise InputError(f"unknown sheaf subcommand {args.what}")


def cmd_grid(args) -> int:
    doc, site, grid, presheaves = _load_site(args)
    t0 = time.time()
    if args.what == "pregrid":
        pre = build_pregrid(site, args.object or min(site.category.objects))
        rep = validate_pregrid(pre, site)
        out = sio.site_to_json(site, grid=pre, presheaves=presheaves)
        out["pregrid_report"] = rep.to_json()
        _emit(out, args)
        return _report_exit(rep)
    if args.what == "build":
        pre = build_pregrid(site, args.object or min(site.category.objects))
        built = build_grid(pre, site)
        rep = validate_grid(built, site)
        if args.format == "dot":
            _write(sio.grid_to_dot(built, site.name), args.out)
            return _report_exit(rep)
        out = sio.site_to_json(site, grid=built, presheaves=presheaves)
        out["grid_report"] = rep.to_json()
        _emit(out, args)
        return _report_exit(rep)
    if args.what == "validate":
        if grid is None:
            raise InputError("document carries no grid")
        rep = validate_grid(grid, site)
        if args.format == "dot":
            _write(sio.grid_to_dot(grid, site.name), args.out)
            return _report_exit(rep)
        out = sio.report_document(
            "grid validate",
            doc,
            rep.passed,
            report=rep.to_json(),
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return _report_exit(rep)
    raise InputError(f"unknown grid subcommand {args.what}")


def cmd_monoid(args) -> int:
    doc, site, grid, _ = _load_site(args)
    t0 = time.time()
    grid = _need_grid(doc, site, grid, seed=args.object)
    monoid = compute_monoid(grid, site)
    if args.what in ("compute", "table"):
        out = sio.report_document(
            f"monoid {args.what}",
            doc,
            True,
            monoid=monoid.to_json(),
            is_group=monoid.is_group(),
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS
    if args.what == "topology":
        topo = coset_neighborhood_basis(monoid)
        ok = topo["filter_base"] and topo["translation_continuous"]
        out = sio.report_document(
            "monoid topology",
            doc,
            ok,
            topology=topo,
            timing_ms=int(1000 * (time.time() - t0)),
        )
        _emit(out, args)
        return PASS if ok else VIOLATION
    raise InputError(f"unknown monoid subcommand {args.what}")


def cmd_equiv(args) -> int:
    doc, site, grid, _ = _load_site(args)
    t0 = time.time()
    grid = _need_grid(doc, site, grid)
    monoid = compute_monoid(grid, site)
    rep = verify_equivalence(monoid, args.bound)
    out = sio.report_document(
        "equiv verify",
        doc,
        rep["pass"],
        equivalence=rep,
        timing_ms=int(1000 * (time.time() - t0)),
    )
    _emit(out, args)
    return PASS if rep["pass"] else VIOLATION


def cmd_point(args) -> int:
    doc, site, grid, _ = _load_site(args)
    t0 = time.time()
    grid = _need_grid(doc, site, grid)
    monoid = compute_monoid(grid, site)
    sheaves = enumerate_sheaves(site, args.sections)
    y = tuple(f"y{i}" for i in range(args.y_size))
    f_star, rep = point_adjoint(monoid, y, test_sheaves=sheaves)
    passed = rep["is_sheaf"] and rep["adjunction_pass"] and rep["reflects_isomorphisms"]
    out = sio.report_document(
        "point check",
        doc,
        passed,
        point=rep,
        value_sheaf=sio.presheaf_to_json(f_star),
        timing_ms=int(1000 * (time.time() - t0)),
    )
    _emit(out, args)
    return PASS if passed else VIOLATION


def cmd_example(args) -> int:
    if args.what == "gsets":
        if args.cyclic:
            group = GroupTable.cyclic(args.cyclic)
        elif args.symmetric:
            group = GroupTable.symmetric(args.symmetric)
        elif args.klein:
            group = GroupTable.direct_product(GroupTable.cyclic(2), GroupTable.cyclic(2))
        else:
            raise InputError("choose --cyclic N, --symmetric N, or --klein")
        site, grid = build_gsets_site(group)
        _emit(sio.site_to_json(site, grid=grid), args)
        return PASS
    if args.what == "succ":
        site = build_successor_site(args.n, plus=args.plus)
        _emit(sio.site_to_json(site), args)
        return PASS
    if args.what == "cycspan":
        site = build_cyclic_span_site(args.modulus)
        _emit(sio.site_to_json(site), args)
        return PASS
    raise InputError(f"unknown example {args.what}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="sitoform", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, needs_in=True):
        if needs_in:
            p.add_argument("--in", dest="infile", default="-", help="input document path or -")
        p.add_argument("--out", default="-", help="output path or -")
        p.add_argument("--format", choices=("json", "dot"), default="json")
        p.add_argument("--window-margin", type=int, default=2)

    p = sub.add_parser("check", help="validate a category, site, or layered site axioms")
    p.add_argument("what", choices=("category", "site", "ysite"))
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("galois", help="list Galois coverings or test for enough of them")
    p.add_argument("what", choices=("list", "enough"))
    p.add_argument("--object", default=None)
    common(p)
    p.set_defaults(fn=cmd_galois)

    p = sub.add_parser("sheaf", help="check, sheafify, or enumerate morphisms of presheaves")
    p.add_argument("what", choices=("check", "sheafify", "hom"))
    p.add_argument("--presheaf", default="F")
    p.add_argument("--presheaf2", default="G")
    common(p)
    p.set_defaults(fn=cmd_sheaf)

    p = sub.add_parser("grid", help="construct or validate pregrids and grids")
    p.add_argument("what", choices=("pregrid", "build", "validate"))
    p.add_argument("--object", default=None, help="seed object for the construction")
    common(p)
    p.set_defaults(fn=cmd_grid)

    p = sub.add_parser("monoid", help="compute the Galois monoid and its topology")
    p.add_argument("what", choices=("compute", "table", "topology"))
    p.add_argument("--object", default=None)
    common(p)
    p.set_defaults(fn=cmd_monoid)

    p = sub.add_parser("equiv", help="verify the sheaf/smooth-set equivalence")
    p.add_argument("what", choices=("verify",))
    p.add_argument("--bound", type=int, default=3)
    common(p)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("point", help="check the adjoint pair defining the topos point")
    p.add_argument("what", choices=("check",))
    p.add_argument("--y-size", type=int, default=2)
    p.add_argument("--sections", type=int, default=2)
    common(p)
    p.set_defaults(fn=cmd_point)

    p = sub.add_parser("example", help="emit a stock example site document")
    p.add_argument("what", choices=("gsets", "succ", "cycspan"))
    p.add_argument("--cyclic", type=int, default=None)
    p.add_argument("--symmetric", type=int, default=None)
    p.add_argument("--klein", action="store_true")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--plus", action="store_true")
    p.add_argument("--modulus", type=int, default=12)
    common(p, needs_in=False)
    p.set_defaults(fn=cmd_example)

    return top


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else PASS
    try:
        return args.fn(args)
    except (InputError, PreconditionError, ResourceLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except SitoformError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return VIOLATION


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
