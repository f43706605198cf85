"""Command-line surface: scenario registry, file-sourced filtered
complexes, and rendering of groups, differentials and convergence levels.

Exit codes: 2 unknown scenario, 3 malformed file, 4 page not guaranteed by
the transfer theorem (without --force), 5 coordinate arity mismatch,
6 unbounded filtration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .chains import ChainComplex, Combination, Generator, format_combination
from .effective import sample_generators, validate_reduction
from .errors import (
    ArityError,
    MalformedFileError,
    NeedsEffectiveHomologyError,
    SpectraError,
    UnboundedFiltrationError,
    UnknownScenarioError,
)
from .scenarios import SCENARIO_NAMES, build_scenario, scenario_descriptions
from .simplicial import AbstractSimplex, render_absm
from .spectral import (
    FilteredComplex,
    convergence_level,
    make_filtered,
    page_differential,
    page_group,
)

EXIT_UNKNOWN_SCENARIO = 2
EXIT_MALFORMED_FILE = 3
EXIT_UNGUARANTEED = 4
EXIT_ARITY = 5
EXIT_UNBOUNDED = 6


def render_key(key) -> str:
    """Human-readable generator rendering, Kenzo-flavoured."""
    if isinstance(key, str):
        return key
    if isinstance(key, tuple) and key and key[0] == "tnpr":
        return f"<TnPr {render_key(key[2])} {render_key(key[4])}>"
    if (
        isinstance(key, tuple)
        and len(key) == 2
        and all(isinstance(x, AbstractSimplex) for x in key)
    ):
        b, f = key
        return f"<CrPr {render_absm(b, render_core)} {render_absm(f, render_core)}>"
    return render_core(key)


def render_core(core) -> str:
    if isinstance(core, tuple):
        return "[" + "|".join(map(str, core)) + "]"
    return str(core)


def format_page_text(page, raw: bool) -> str:
    lines = [f"Spectral sequence E^{page.r}_{{{page.p},{page.q}}}"]
    comps = page.components()
    if not comps:
        lines.append("NIL")
    else:
        lines.extend(f"Component {c}" for c in comps)
    if raw:
        for comb in page.display_combinations:
            lines.append(format_combination(comb, render_key))
        lines.append("divisors: (" + " ".join(map(str, page.divisors)) + ")")
    return "\n".join(lines)


# -- file-sourced filtered complexes ----------------------------------------


def load_filtered_complex_file(path: str) -> FilteredComplex:
    """Parse the JSON filtered-complex format:

    {"degrees": {"n": ["g1", ...]},
     "differential": {"n:gi": [[coef, "gj"], ...]},
     "filtration": {"gi": p}}

    Differential targets live in degree n-1; d*d = 0 and filtration
    compatibility are checked at parse time.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise MalformedFileError(f"{path}: {e}") from e
    if not isinstance(doc, dict) or "degrees" not in doc:
        raise MalformedFileError(f"{path}: missing 'degrees' table")
    try:
        degrees = {int(n): list(names) for n, names in doc["degrees"].items()}
    except (TypeError, ValueError) as e:
        raise MalformedFileError(f"{path}: bad degree key ({e})") from e
    gens: dict[int, list[Generator]] = {}
    lookup: dict[tuple[int, str], Generator] = {}
    for n, names in sorted(degrees.items()):
        if len(set(names)) != len(names):
            raise MalformedFileError(f"{path}: duplicate generator name in degree {n}")
        gens[n] = [Generator(n, str(name)) for name in names]
        for g in gens[n]:
            lookup[(n, g.key)] = g

    diff_table: dict[Generator, Combination] = {}
    for key, terms in (doc.get("differential") or {}).items():
        try:
            n_str, name = key.split(":", 1)
            n = int(n_str)
        except ValueError as e:
            raise MalformedFileError(f"{path}: bad differential key {key!r}") from e
        src = lookup.get((n, name))
        if src is None:
            raise MalformedFileError(f"{path}: differential on unknown generator {key!r}")
        parsed = []
        for item in terms:
            try:
                coef, tgt_name = int(item[0]), str(item[1])
            except (TypeError, ValueError, IndexError) as e:
                raise MalformedFileError(f"{path}: bad differential term {item!r}") from e
            tgt = lookup.get((n - 1, tgt_name))
            if tgt is None:
                raise MalformedFileError(
                    f"{path}: differential target {tgt_name!r} not in degree {n-1}"
                )
            parsed.append((coef, tgt))
        diff_table[src] = Combination.build(n - 1, parsed)

    flt_doc = doc.get("filtration") or {}
    flt: dict[Generator, int] = {}
    for n, glist in gens.items():
        for g in glist:
            val = flt_doc.get(f"{n}:{g.key}", flt_doc.get(g.key))
            if val is None:
                raise MalformedFileError(f"{path}: no filtration index for {g.key!r}")
            flt[g] = int(val)

    complex = ChainComplex(
        lambda n: gens.get(n, []),
        lambda g: diff_table.get(g, Combination.zero(g.degree - 1)),
        origin=f"file({os.path.basename(path)})",
    )
    checked = sorted(gens)
    for n in checked:
        for g in gens[n]:
            dd = complex.d(complex.d(g))
            if not dd.is_zero():
                raise MalformedFileError(f"{path}: d*d != 0 on {n}:{g.key}")
    try:
        return make_filtered(
            complex,
            lambda n, g: flt[g],
            origin=complex.origin,
            check_degrees=checked,
        )
    except SpectraError as e:
        raise MalformedFileError(f"{path}: {e}") from e


def resolve_source(source: str) -> FilteredComplex:
    if source in SCENARIO_NAMES:
        return build_scenario(source).filtered
    if source.endswith(".json") or os.path.sep in source or os.path.exists(source):
        return load_filtered_complex_file(source)
    raise UnknownScenarioError(
        f"unknown scenario {source!r}; available: {', '.join(SCENARIO_NAMES)}"
    )


# -- commands ----------------------------------------------------------------


def cmd_group(args) -> int:
    fc = resolve_source(args.source)
    page = page_group(fc, args.r, args.p, args.q)
    if not page.guaranteed and not args.force:
        print(
            f"E^{args.r} at r <= homotopy order is not guaranteed by the "
            "transfer theorem; rerun with --force to print it anyway",
            file=sys.stderr,
        )
        return EXIT_UNGUARANTEED
    if args.format == "json":
        out = page.to_json()
        out["guaranteed"] = page.guaranteed
        print(json.dumps(out))
    else:
        print(format_page_text(page, raw=args.raw))
    return 0


def cmd_bd(args) -> int:
    args.raw = True
    return cmd_group(args)


def cmd_dffr(args) -> int:
    fc = resolve_source(args.source)
    page = page_group(fc, args.r, args.p, args.q)
    if not page.guaranteed and not args.force:
        print("page not guaranteed; use --force", file=sys.stderr)
        return EXIT_UNGUARANTEED
    coords = page_differential(fc, args.r, args.p, args.q, args.coords)
    if args.format == "json":
        print(json.dumps({"r": args.r, "p": args.p, "q": args.q, "image": coords}))
    else:
        print("(" + " ".join(map(str, coords)) + ")")
    return 0


def cmd_cnvg(args) -> int:
    fc = resolve_source(args.source)
    report = convergence_level(fc, args.n)
    if args.format == "json":
        print(json.dumps({"degree": report.degree, "level": report.level}))
    else:
        print(report.level)
    return 0


def cmd_sweep(args) -> int:
    fc = resolve_source(args.source)
    s, t = fc.bounds(args.n)
    pages = []
    for p in range(s + 1, max(t, args.n) + 1):
        page = page_group(fc, args.r, p, args.n - p)
        if not page.guaranteed and not args.force:
            print("page not guaranteed; use --force", file=sys.stderr)
            return EXIT_UNGUARANTEED
        pages.append(page)
    if args.format == "json":
        print(json.dumps([pg.to_json() for pg in pages]))
    else:
        for pg in pages:
            print(format_page_text(pg, raw=False))
    return 0


def cmd_validate(args) -> int:
    if args.source in SCENARIO_NAMES:
        scenario = build_scenario(args.source)
    else:
        fc = load_filtered_complex_file(args.source)
        print(f"{fc.origin}: parse-time checks passed (d*d = 0, filtration compatible)")
        return 0
    fc = scenario.filtered
    ok = True
    if scenario.equivalence is not None:
        eq = scenario.equivalence.equivalence
        for label, red in (("left", eq.left), ("right", eq.right)):
            samples = sample_generators(
                red.top, range(1, 5), count=args.samples, seed=args.seed
            )
            rep = validate_reduction(red, samples)
            print(f"{args.source}: {label} reduction {rep.summary()}")
            ok = ok and rep.ok
    degrees = range(0, 6) if fc.complex.effective else range(1, 5)
    checked = 0
    if fc.complex.effective:
        gens = [g for n in degrees for g in fc.complex.basis(n)]
    else:
        import random

        rng = random.Random(args.seed)
        gens = [fc.complex.sampler(rng, n) for n in degrees for _ in range(args.samples // 4)]
    for g in gens:
        if not fc.complex.d(fc.complex.d(g)).is_zero():
            print(f"{args.source}: d*d != 0 on {g!r}")
            ok = False
        pg = fc.flin(g.degree, g)
        for _, h in fc.complex.d(g).terms:
            if fc.flin(g.degree - 1, h) > pg:
                print(f"{args.source}: filtration raised on {g!r}")
                ok = False
        checked += 1
    print(f"{args.source}: d*d = 0 and filtration compatibility on {checked} generators")
    return 0 if ok else 1


def cmd_list_scenarios(args) -> int:
    for name, desc, effective in scenario_descriptions():
        path = "effective" if effective else "effective-homology"
        print(f"{name:8s} [{path}] {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra",
        description="Spectral sequences of filtered chain complexes, exactly.",
    )
    default_seed = int(os.environ.get("SPECTRA_SEED", "0"))
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, coords=False, with_rpq=True):
        p.add_argument("source", help="scenario name or filtered-complex JSON file")
        if with_rpq:
            p.add_argument("r", type=int)
            p.add_argument("p", type=int)
            p.add_argument("q", type=int)
        if coords:
            p.add_argument("coords", type=int, nargs="*")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--force", action="store_true", help="print pages below the transfer order")
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=default_seed)

    p = sub.add_parser("group", help="components of E^r_{p,q}")
    common(p)
    p.add_argument("--raw", action="store_true", help="include basis-divisors data")
    p.set_defaults(fn=cmd_group)

    p = sub.add_parser("bd", help="basis-divisors description of E^r_{p,q}")
    common(p)
    p.set_defaults(fn=cmd_bd)

    p = sub.add_parser("dffr", help="differential d^r_{p,q} on given coordinates")
    common(p, coords=True)
    p.set_defaults(fn=cmd_dffr)

    p = sub.add_parser("cnvg", help="convergence level for a degree")
    p.add_argument("source")
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--force", action="store_true")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(fn=cmd_cnvg)

    p = sub.add_parser("sweep", help="all E^r_{p,q} on the antidiagonal p+q = n")
    p.add_argument("source")
    p.add_argument("n", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--force", action="store_true")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("validate", help="run the reduction/identity suites")
    p.add_argument("source")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("list-scenarios", help="available scenario names")
    p.set_defaults(fn=cmd_list_scenarios)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnknownScenarioError as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNKNOWN_SCENARIO
    except MalformedFileError as e:
        print(str(e), file=sys.stderr)
        return EXIT_MALFORMED_FILE
    except ArityError as e:
        print(str(e), file=sys.stderr)
        return EXIT_ARITY
    except (UnboundedFiltrationError, NeedsEffectiveHomologyError) as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNBOUNDED


if __name__ == "__main__":
    sys.exit(main())
