"""Batch command-line front end.

Every run echoes its resolved configuration into the output header and is
byte-identical for identical config and seed.  Exit codes: 0 success with
all asserted checks passing, 2 when an engine ran but a mathematical check
failed (the report is still emitted), 1 for usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import certificates, dynamics, fpp
from .catalog import catalog_get, catalog_names
from .errors import ArborError, BudgetExceeded
from .presentation import WreathPresentation, parse_word_text
from .quotient import DEFAULT_ELEMENT_BUDGET, enumerate_tower
from .tree import parse_vertex

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


def _default_budget() -> int:
    env = os.environ.get("ARBOR_BUDGET")
    return int(env) if env else DEFAULT_ELEMENT_BUDGET


def _emit(args, config: dict, result: dict, exit_code: int) -> int:
    doc = {"config": config, "result": result}
    if args.format == "csv" and "csv_rows" in result:
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in result["csv_rows"]:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        result.pop("csv_rows", None)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code


def _load_entry(args):
    """Resolve --catalog / --presentation to (entry_or_None, presentation,
    gen_words)."""
    if getattr(args, "catalog", None):
        entry = catalog_get(args.catalog)
        return entry, entry.presentation, entry.gen_words
    if getattr(args, "presentation", None):
        return None, WreathPresentation.from_path(args.presentation), None
    raise ArborError("need --catalog NAME or --presentation FILE")


def _load_poly(args):
    if getattr(args, "catalog", None):
        entry = catalog_get(args.catalog)
        if entry.polynomial is None:
            raise ArborError(f"catalog entry {entry.name!r} has no polynomial")
        return entry.polynomial, None
    if getattr(args, "poly", None):
        with open(args.poly, encoding="utf-8") as fh:
            return dynamics.PolynomialMap.from_json(json.load(fh))
    raise ArborError("need --catalog NAME or --poly FILE")


def _config(args, **extra):
    cfg = {"subcommand": args.command_path, "budget": args.budget,
           "format": args.format}
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    for key in ("catalog", "presentation", "poly", "output"):
        if getattr(args, key, None):
            cfg[key] = getattr(args, key)
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------
# group commands


def cmd_group_enumerate(args):
    entry, pres, gen_words = _load_entry(args)
    if entry is not None and entry.virtual_full_aut:
        tower = entry.tower(args.level, args.budget)
    else:
        tower = enumerate_tower(pres, args.level, args.budget, gen_words)
    result = {
        "orders": [q.order for q in tower],
        "level_transitive": [bool(q.is_level_transitive()) for q in tower],
        "quotient": tower[-1].to_json(include_portraits=args.dump_portraits),
    }
    return _emit(args, _config(args, level=args.level), result, EXIT_OK)


def cmd_group_check_fractal(args):
    _, pres, gen_words = _load_entry(args)
    report = certificates.check_fractal(pres, args.level_bound, args.section_depth,
                                        args.budget, gen_words)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return _emit(args, _config(args, level_bound=args.level_bound,
                               section_depth=args.section_depth),
                 report.to_json(), code)


def cmd_group_check_ssf(args):
    _, pres, gen_words = _load_entry(args)
    report = certificates.check_super_strongly_fractal(
        pres, args.level_bound, args.section_depth, args.budget, gen_words)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return _emit(args, _config(args, level_bound=args.level_bound,
                               section_depth=args.section_depth),
                 report.to_json(), code)


def cmd_group_check_mixing(args):
    _, pres, gen_words = _load_entry(args)
    cert = certificates.check_mixing_certificate(pres, args.n, args.m, args.delay,
                                                 args.budget, gen_words)
    code = EXIT_OK if cert.passed else EXIT_CHECK_FAILED
    return _emit(args, _config(args, n=args.n, m=args.m, delay=args.delay),
                 cert.to_json(), code)


def cmd_group_commutator_search(args):
    _, pres, gen_words = _load_entry(args)
    witness = certificates.commutator_search(pres, args.generator, args.delay,
                                             args.conj_len, args.search_budget)
    if witness is None:
        return _emit(args, _config(args, generator=args.generator, delay=args.delay),
                     {"found": False}, EXIT_CHECK_FAILED)
    return _emit(args, _config(args, generator=args.generator, delay=args.delay),
                 {"found": True, "witness": witness.to_json()}, EXIT_OK)


def cmd_group_kg(args):
    _, pres, gen_words = _load_entry(args)
    report = certificates.kg_depth(pres, args.path_depth, args.section_depth,
                                   args.budget, gen_words)
    return _emit(args, _config(args, path_depth=args.path_depth,
                               section_depth=args.section_depth),
                 report.to_json(), EXIT_OK)


def cmd_group_pseudomixing(args):
    _, pres, gen_words = _load_entry(args)
    u = parse_vertex(pres.degree, args.u)
    w = parse_vertex(pres.degree, args.w)
    report = certificates.verify_pseudomixing(pres, len(u), args.m, u, w,
                                              args.budget, gen_words)
    return _emit(args, _config(args, m=args.m, u=args.u, w=args.w),
                 report.to_json(), EXIT_OK)


# ---------------------------------------------------------------------------
# fpp commands


def cmd_fpp_table(args):
    entry, pres, gen_words = _load_entry(args)
    tower = None
    if entry is not None and entry.virtual_full_aut:
        tower = entry.tower(args.levels, args.budget)
    table = fpp.fixed_point_table(pres, args.levels, args.budget, gen_words,
                                  tower=tower)
    result = table.to_json()
    result["csv_rows"] = table.to_csv_rows()
    return _emit(args, _config(args, levels=args.levels), result, EXIT_OK)


def cmd_fpp_martingale(args):
    entry, pres, gen_words = _load_entry(args)
    tower = None
    if entry is not None and entry.virtual_full_aut:
        tower = entry.tower(args.level + 1, args.budget)
    report = fpp.martingale_fiber_check(pres, args.level, args.budget, gen_words,
                                        tower=tower)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return _emit(args, _config(args, level=args.level), report.to_json(), code)


def cmd_fpp_aut_tree(args):
    if args.float:
        ps = fpp.aut_tree_fpp_float(args.degree, args.levels)
        rows = [{"level": i, "proportion_float": p} for i, p in enumerate(ps)]
    else:
        ps = fpp.aut_tree_fpp(args.degree, args.levels)
        rows = [{"level": i, "proportion_num": p.numerator,
                 "proportion_den": p.denominator, "proportion_float": float(p)}
                for i, p in enumerate(ps)]
    csv_rows = [["level", "proportion_num", "proportion_den", "proportion_float"]]
    for i, p in enumerate(ps):
        if args.float:
            csv_rows.append([i, "", "", p])
        else:
            csv_rows.append([i, p.numerator, p.denominator, float(p)])
    return _emit(args, _config(args, degree=args.degree, levels=args.levels,
                               float=args.float),
                 {"levels": rows, "csv_rows": csv_rows}, EXIT_OK)


def cmd_fpp_dihedral(args):
    rows = []
    csv_rows = [["level", "proportion_num", "proportion_den", "proportion_float"]]
    for n in range(1, args.levels + 1):
        p = fpp.dihedral_fpp_closed_form(args.degree, n)
        rows.append({"level": n, "proportion_num": p.numerator,
                     "proportion_den": p.denominator, "proportion_float": float(p)})
        csv_rows.append([n, p.numerator, p.denominator, float(p)])
    limit = "1/2" if args.degree % 2 == 1 else "1/4"
    return _emit(args, _config(args, degree=args.degree, levels=args.levels),
                 {"levels": rows, "limit": limit, "csv_rows": csv_rows}, EXIT_OK)


def cmd_fpp_sample(args):
    if args.aut_degree:
        source = fpp.AutSampler(args.aut_degree)
    else:
        entry, pres, gen_words = _load_entry(args)
        if args.heuristic_words:
            source = fpp.HeuristicWordSampler(pres, args.word_length)
        elif entry is not None and entry.virtual_full_aut:
            source = fpp.AutSampler(pres.degree)
        else:
            tower = enumerate_tower(pres, args.level, args.budget, gen_words)
            source = fpp.QuotientSampler(tower[-1])
    est = fpp.monte_carlo_fpp(source, args.level, args.trials, args.seed)
    return _emit(args, _config(args, level=args.level, trials=args.trials),
                 est.to_json(), EXIT_OK)


# ---------------------------------------------------------------------------
# dyn commands


def _analysis(args):
    f, claimed = _load_poly(args)
    crit = dynamics.critical_data(f, claimed)
    orbit = dynamics.post_critical_orbit(f, crit, args.orbit_bound)
    return f, crit, orbit


def cmd_dyn_analyze(args):
    f, crit, orbit = _analysis(args)
    result = {
        "degree": f.degree,
        "critical_data": crit.to_json(),
        "post_critical": orbit.to_json(),
    }
    if orbit.pcf:
        delta = dynamics.delta_set(f, crit, orbit)
        result["delta_affine"] = [dynamics._fmt_point(p) for p in delta]
        result["upsilon_affine"] = [
            dynamics._fmt_point(p) for p in dynamics.upsilon_set(f, crit, orbit, delta)
        ]
        result["sigma"] = [dynamics._fmt_point(p)
                           for p in dynamics.sigma_set(f, crit, orbit)]
        result["orbifold"] = dynamics.orbifold_signature(f, crit, orbit).to_json()
    return _emit(args, _config(args), result, EXIT_OK)


def cmd_dyn_classify(args):
    f, claimed = _load_poly(args)
    crit = dynamics.critical_data(f, claimed)
    report = dynamics.classify_polynomial(f, crit, args.orbit_bound)
    return _emit(args, _config(args), report.to_json(), EXIT_OK)


def cmd_dyn_chebyshev(args):
    f, claimed = _load_poly(args)
    crit = dynamics.critical_data(f, claimed)
    report = dynamics.classify_polynomial(f, crit, args.orbit_bound)
    match = dynamics.detect_twisted_chebyshev(f, report)
    code = EXIT_OK if match.matched else EXIT_CHECK_FAILED
    return _emit(args, _config(args), match.to_json(), code)


def cmd_dyn_validate(args):
    if args.catalog:
        entry = catalog_get(args.catalog)
        if entry.polynomial is None or entry.inertia is None:
            raise ArborError(f"catalog entry {entry.name!r} has no polynomial pairing")
        pres, f = entry.presentation, entry.polynomial
        inertia, g_inf = entry.inertia, entry.g_inf
    else:
        with open(args.pair, encoding="utf-8") as fh:
            doc = json.load(fh)
        pres = WreathPresentation.from_json(doc["presentation"])
        f, _ = dynamics.PolynomialMap.from_json(doc["polynomial"])
        inertia = {
            f.field.element(dynamics._parse_elt(f.field, item["point"])):
                parse_word_text(" ".join(item["word"]))
            for item in doc["inertia"]
        }
        g_inf = parse_word_text(" ".join(doc["g_inf"]))
    crit = dynamics.critical_data(f)
    orbit = dynamics.post_critical_orbit(f, crit, args.orbit_bound)
    report = dynamics.validate_recursion_against_polynomial(
        pres, f, crit, orbit, args.depth, inertia, g_inf, args.budget)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return _emit(args, _config(args, depth=args.depth), report.to_json(), code)


# ---------------------------------------------------------------------------
# catalog commands


def cmd_catalog_list(args):
    result = {"entries": [{"name": n, "description": catalog_get(n).description}
                          for n in catalog_names()]}
    return _emit(args, _config(args), result, EXIT_OK)


def cmd_catalog_show(args):
    entry = catalog_get(args.name)
    return _emit(args, _config(args, name=args.name), entry.to_json(), EXIT_OK)


# ---------------------------------------------------------------------------
# wiring


def _add_common(p, seed=False):
    p.add_argument("--budget", type=int, default=None,
                   help="element budget (default ARBOR_BUDGET or 2000000)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write output to a file instead of stdout")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _add_source(p):
    p.add_argument("--catalog", help=f"one of: {', '.join(catalog_names())}")
    p.add_argument("--presentation", help="presentation JSON file")


def build_parser():
    top = argparse.ArgumentParser(
        prog="arbor",
        description="self-similar groups, fixed-point statistics, and "
                    "post-critically finite polynomial classification",
    )
    sub = top.add_subparsers(dest="section", required=True)

    grp = sub.add_parser("group", help="quotients and structural certificates")
    gsub = grp.add_subparsers(dest="action", required=True)

    p = gsub.add_parser("enumerate", help="enumerate quotients up to a level")
    _add_source(p); _add_common(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--dump-portraits", action="store_true")
    p.set_defaults(func=cmd_group_enumerate, command_path="group enumerate")

    p = gsub.add_parser("check-fractal", help="vertex projections surjective")
    _add_source(p); _add_common(p)
    p.add_argument("--level-bound", type=int, default=2)
    p.add_argument("--section-depth", type=int, default=2)
    p.set_defaults(func=cmd_group_check_fractal, command_path="group check-fractal")

    p = gsub.add_parser("check-ssf", help="level stabilizers project onto the group")
    _add_source(p); _add_common(p)
    p.add_argument("--level-bound", type=int, default=2)
    p.add_argument("--section-depth", type=int, default=2)
    p.set_defaults(func=cmd_group_check_ssf, command_path="group check-ssf")

    p = gsub.add_parser("check-mixing", help="finite mixing certificate at (n, m, N)")
    _add_source(p); _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delay", type=int, required=True)
    p.set_defaults(func=cmd_group_check_mixing, command_path="group check-mixing")

    p = gsub.add_parser("commutator-search", help="witness for the commutator trick")
    _add_source(p); _add_common(p)
    p.add_argument("--generator", required=True)
    p.add_argument("--delay", type=int, default=4)
    p.add_argument("--conj-len", type=int, default=2)
    p.add_argument("--search-budget", type=int, default=20000)
    p.set_defaults(func=cmd_group_commutator_search,
                   command_path="group commutator-search")

    p = gsub.add_parser("kg", help="intersection of stabilizer sections along 111...")
    _add_source(p); _add_common(p)
    p.add_argument("--path-depth", type=int, required=True)
    p.add_argument("--section-depth", type=int, required=True)
    p.set_defaults(func=cmd_group_kg, command_path="group kg")

    p = gsub.add_parser("pseudomixing", help="exact cone-pair counting identity")
    _add_source(p); _add_common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--u", required=True, help="vertex word, e.g. 1 or 12")
    p.add_argument("--w", required=True)
    p.set_defaults(func=cmd_group_pseudomixing, command_path="group pseudomixing")

    fp = sub.add_parser("fpp", help="fixed-point statistics")
    fsub = fp.add_subparsers(dest="action", required=True)

    p = fsub.add_parser("table", help="exact fixer proportions per level")
    _add_source(p); _add_common(p)
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_fpp_table, command_path="fpp table")

    p = fsub.add_parser("martingale", help="fiber-mean check at one level")
    _add_source(p); _add_common(p)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_fpp_martingale, command_path="fpp martingale")

    p = fsub.add_parser("aut-tree", help="full automorphism group, exact recursion")
    _add_common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--float", action="store_true",
                   help="float recursion (for long horizons)")
    p.set_defaults(func=cmd_fpp_aut_tree, command_path="fpp aut-tree")

    p = fsub.add_parser("dihedral", help="dihedral closed form per level")
    _add_common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_fpp_dihedral, command_path="fpp dihedral")

    p = fsub.add_parser("sample", help="seeded Monte-Carlo estimate of P(X_n >= 1)")
    _add_source(p); _add_common(p, seed=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--aut-degree", type=int,
                   help="sample the full automorphism group of this degree")
    p.add_argument("--heuristic-words", action="store_true",
                   help="biased random-word sampling (explicit opt-in)")
    p.add_argument("--word-length", type=int, default=20)
    p.set_defaults(func=cmd_fpp_sample, command_path="fpp sample")

    dyn = sub.add_parser("dyn", help="polynomial dynamics over number fields")
    dsub = dyn.add_subparsers(dest="action", required=True)

    for name, func, helptext in (
        ("analyze", cmd_dyn_analyze, "critical data, orbits, exceptional sets"),
        ("classify", cmd_dyn_classify, "fixed-point-proportion verdict"),
        ("chebyshev", cmd_dyn_chebyshev, "twisted Chebyshev detection"),
    ):
        p = dsub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--poly", help="polynomial JSON file")
        p.add_argument("--catalog", help="use a catalog entry's polynomial")
        p.add_argument("--orbit-bound", type=int, default=64)
        p.set_defaults(func=func, command_path=f"dyn {name}")

    p = dsub.add_parser("validate", help="wreath recursion vs polynomial")
    _add_common(p)
    p.add_argument("--catalog", help="validate a catalog pairing")
    p.add_argument("--pair", help="JSON file with presentation/polynomial/inertia")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--orbit-bound", type=int, default=64)
    p.set_defaults(func=cmd_dyn_validate, command_path="dyn validate")

    cat = sub.add_parser("catalog", help="vetted fixtures")
    csub = cat.add_subparsers(dest="action", required=True)

    p = csub.add_parser("list", help="list entries")
    _add_common(p)
    p.set_defaults(func=cmd_catalog_list, command_path="catalog list")

    p = csub.add_parser("show", help="dump one entry")
    _add_common(p)
    p.add_argument("name")
    p.set_defaults(func=cmd_catalog_show, command_path="catalog show")

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is None:
        args.budget = _default_budget()
    try:
        return args.func(args)
    except ArborError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
