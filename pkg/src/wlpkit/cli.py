"""Command-line interface: ``wlpkit <command> [input] [options]``.

Every command produces a JSON report with the stable top-level keys
``schema_version, command, field, input_sha256, hvector, wlp, jordan,
timing_ms`` plus a command-specific ``result``.  Exit codes: 0 when a verdict
was computed (a failing WLP is a verdict), 2 on input errors, 3 when the
answer is undetermined or a computation did not stabilize.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field as dc_field

from .errors import Inconclusive, NotStabilized, ParseError, UndeterminedOverQ, WlpkitError
from .exactfield import parse_field
from .fileformats import ParsedInput, read_input
from .gorenstein import (certify_gorenstein, compressed_hvector, compressed_random, inverse_system_form,
                         level_decompose, level_type, pfaffian_ideal, truncate_algebra)
from .gradedquot import hilbert_function, hvector, socle_dims, stabilized_hilbert
from .lefschetz import (LinearForm, general_jordan, green_restriction_dim, jordan_partition, slp_check,
                        wlp_check)
from .planegeom import (CubicSystem, base_locus, fiber_decomposition, hb_analysis, is_hesse_configuration,
                        linkage_check, morphism_fibers)
from .search import DEFAULT_SEED, search

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_UNDETERMINED = 0, 2, 3

COMMANDS = ("hilbert", "wlp", "slp", "jordan", "green", "annihilator", "compressed", "pfaffian", "certify",
            "truncate", "decompose", "hesse", "fibers", "hb", "linkage", "search")
# commands that run without an input file
_NO_INPUT = {"compressed", "search"}


@dataclass
class RunConfig:
    command: str
    input_path: str = None
    field: str = None
    seed: int = DEFAULT_SEED
    trials: int = 20
    max_degree: int = None
    exhaustive: bool = False
    workers: int = 1
    output: str = "json"
    out_path: str = None
    options: dict = dc_field(default_factory=dict)


class _Undetermined(Exception):
    """Internal signal: the report is complete but carries no verdict."""


def _base_report(cfg: RunConfig, field, sha):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "field": str(field) if field is not None else None,
        "input_sha256": sha,
        "hvector": None,
        "wlp": None,
        "jordan": None,
        "timing_ms": None,
        "result": {},
    }


def _lefschetz_block(rep):
    return {
        "verdict": rep.verdict,
        "witness": str(rep.witness) if rep.witness is not None else None,
        "witness_field": rep.witness_field,
        "ranks": [{"i": i, "m": m, "rank": r, "rows": a, "cols": b} for i, m, r, a, b in rep.per_degree_ranks],
        "certificate": rep.certificate,
        "forms_checked": rep.trials,
        "exhaustive": rep.exhaustive,
    }


def _polys(fs):
    return [str(f) for f in fs]


def _form(text, field, names, rng):
    if text in (None, "general", "random"):
        return LinearForm.random(field, len(names), rng)
    return LinearForm.parse(text, field, names)


# --- command handlers --------------------------------------------------------
# Each receives (cfg, parsed input or None, field, report) and fills the report.


def _cmd_hilbert(cfg, inp, F, rep):
    I = inp.ideal()
    probe = cfg.max_degree if cfg.max_degree is not None else 30
    try:
        h = hvector(I, probe)
        rep["hvector"] = list(h.values)
        rep["result"] = {"artinian": True, "socle_degree": h.socle_degree}
    except Inconclusive:
        rep["result"] = {"artinian": False, "values": hilbert_function(I, probe)}
        try:
            value, start = stabilized_hilbert(I, probe)
            rep["result"]["stable_value"], rep["result"]["stable_from"] = value, start
        except NotStabilized:
            rep["result"]["stable_value"] = None


def _run_lefschetz(cfg, inp, rep, kind):
    I = inp.ideal()
    strategy = "exhaustive" if cfg.exhaustive else "random"
    check = wlp_check if kind == "wlp" else slp_check
    try:
        r = check(I, strategy=strategy, trials=cfg.trials, seed=cfg.seed)
    except UndeterminedOverQ as exc:
        r = exc.report
    rep["hvector"] = list(r.hvector)
    if kind == "wlp":
        rep["wlp"] = _lefschetz_block(r)
    else:
        rep["result"]["slp"] = _lefschetz_block(r)
    if cfg.options.get("table") and r.form_table is not None:
        rep["result"]["form_table"] = r.form_table
    if r.verdict == "undetermined":
        raise _Undetermined(f"no {kind.upper()} witness found and failure not certified")


def _cmd_wlp(cfg, inp, F, rep):
    _run_lefschetz(cfg, inp, rep, "wlp")


def _cmd_slp(cfg, inp, F, rep):
    _run_lefschetz(cfg, inp, rep, "slp")


def _cmd_jordan(cfg, inp, F, rep):
    I = inp.ideal()
    rep["hvector"] = list(hvector(I).values)
    form = cfg.options.get("form")
    if form in (None, "general"):
        parts, table = general_jordan(I, seeds=range(cfg.seed, cfg.seed + 10))
        rep["jordan"] = {"form": "general", "parts": list(parts)}
        rep["result"] = {"samples": {str(s): list(p) for s, p in table.items()}}
    else:
        L = LinearForm.parse(form, F, inp.names)
        rep["jordan"] = {"form": str(L), "parts": list(jordan_partition(I, L))}


def _cmd_green(cfg, inp, F, rep):
    I = inp.ideal()
    h = hvector(I)
    rep["hvector"] = list(h.values)
    L = _form(cfg.options.get("form"), F, inp.names, random.Random(cfg.seed))
    d = cfg.options.get("degree")
    if d is None:
        d = (len(h) - 1) // 2 + 1
    rep["result"] = {"form": str(L), "degree": d, "restriction_dim": green_restriction_dim(I, L, d),
                     "hilbert_at_degree": I.hilbert(d)}


def _cmd_annihilator(cfg, inp, F, rep):
    if len(inp.duals) != 1:
        raise ParseError("annihilator needs exactly one 'dual' line")
    I = inp.ideal()
    rep["hvector"] = list(hvector(I).values)
    rep["result"] = {"dual_form": str(inp.duals[0]), "generators": _polys(I.generators)}


def _cmd_compressed(cfg, inp, F, rep):
    e = cfg.options.get("socle_degree")
    if e is None:
        raise ParseError("compressed needs --socle-degree")
    form, I = compressed_random(e, F, seed=cfg.seed)
    rep["hvector"] = list(hvector(I).values)
    rep["result"] = {"socle_degree": e, "dual_form": str(form), "generators": _polys(I.generators),
                     "expected": list(compressed_hvector(e))}


def _cmd_pfaffian(cfg, inp, F, rep):
    M = inp.matrix()
    I = pfaffian_ideal(M)
    rep["result"] = {"pfaffians": _polys(I.pfaffians)}
    try:
        rep["hvector"] = list(hvector(I).values)
    except Inconclusive:
        rep["result"]["artinian"] = False


def _ideal_or_pfaffians(inp):
    return pfaffian_ideal(inp.matrix()) if inp.skew_size is not None else inp.ideal()


def _cmd_certify(cfg, inp, F, rep):
    I = _ideal_or_pfaffians(inp)
    cert = certify_gorenstein(I)
    rep["hvector"] = list(cert.hvector.values)
    rep["result"] = cert.to_dict()
    if cert.certified:
        try:
            rep["result"]["dual_form"] = str(inverse_system_form(I))
        except WlpkitError:
            pass


def _cmd_truncate(cfg, inp, F, rep):
    e_new = cfg.options.get("degree")
    if e_new is None:
        raise ParseError("truncate needs --degree")
    T = truncate_algebra(_ideal_or_pfaffians(inp), e_new)
    e, soc = level_type(T)
    rep["hvector"] = list(hvector(T).values)
    rep["result"] = {"socle_degree": e, "socle_dims": list(soc), "level": sum(soc) == soc[e], "type": soc[e]}


def _cmd_decompose(cfg, inp, F, rep):
    if len(inp.duals) < 1:
        raise ParseError("decompose needs 'dual' lines")
    level, factors = level_decompose(inp.duals)
    h = hvector(level)
    rep["hvector"] = list(h.values)
    rep["result"] = {
        "socle_dims": socle_dims(level, h.socle_degree),
        "factors": [{"dual_form": str(G), "hvector": list(hvector(J).values)} for G, J in zip(inp.duals, factors)],
    }


def _two_cubics(inp):
    if len(inp.generators) != 2:
        raise ParseError("expected exactly two generators")
    return inp.generators


def _cmd_hesse(cfg, inp, F, rep):
    g1, g2 = _two_cubics(inp)
    bl = base_locus(g1, g2)
    res = {"base_locus": bl.to_dict()}
    if bl.splitting_degree == 1 and len(bl.points) == 9:
        hs = is_hesse_configuration(bl)
        per_line, per_point = hs.incidence()
        res.update({"is_hesse": hs.is_hesse, "lines": [sorted(L) for L in hs.lines],
                    "points_per_line": dict(per_line), "lines_per_point": dict(per_point)})
    else:
        res["is_hesse"] = False
    rep["result"] = res


def _cmd_fibers(cfg, inp, F, rep):
    W = CubicSystem(inp.generators)
    fr = morphism_fibers(W, samples=cfg.trials, seed=cfg.seed)
    rep["result"] = fr.to_dict()
    if cfg.options.get("decompose"):
        fd = fiber_decomposition(W, line_seed=cfg.seed)
        rep["result"]["decomposition"] = {
            "fibers": [[str(P) for P in S] for S in fd.sigmas],
            "collinearity_check": fd.collinearity_check,
            "conditions": fd.conditions,
            "field": str(fd.field),
        }


def _cmd_hb(cfg, inp, F, rep):
    I = inp.ideal()
    r = hb_analysis(I, seed=cfg.seed)
    rep["hvector"] = list(r.completion_hvector) if r.gorenstein_completion is not None else None
    rep["result"] = r.to_dict()


def _cmd_linkage(cfg, inp, F, rep):
    r = linkage_check(inp.matrix(), max_degree=cfg.max_degree or 12)
    rep["result"] = r.to_dict()


def _cmd_search(cfg, inp, F, rep):
    if not F.is_finite:
        raise ParseError("search needs a finite field (--field GF(p))")
    summary = search(F, seed=cfg.seed, trials=cfg.trials, workers=cfg.workers, out_path=cfg.out_path,
                     timestamps=bool(cfg.options.get("timestamps")), record_all=bool(cfg.options.get("record_all")))
    rep["result"] = summary.to_dict()
    rep["result"]["records"] = cfg.out_path


_HANDLERS = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def run_command(cfg: RunConfig):
    """Run one command; returns (exit_code, report dict)."""
    if cfg.command not in _HANDLERS:
        return EXIT_INPUT, {"schema_version": SCHEMA_VERSION, "command": cfg.command,
                            "error": f"unknown command {cfg.command!r}"}
    start = time.perf_counter()
    code = EXIT_OK
    F, inp, sha = None, None, None
    rep = _base_report(cfg, None, None)
    try:
        override = parse_field(cfg.field) if cfg.field else None
        if cfg.command in _NO_INPUT:
            F = override or parse_field("Q")
        else:
            if not cfg.input_path:
                raise ParseError(f"{cfg.command} needs an input file")
            inp: ParsedInput = read_input(cfg.input_path, override)
            F, sha = inp.field, inp.sha256
        rep["field"], rep["input_sha256"] = str(F), sha
        _HANDLERS[cfg.command](cfg, inp, F, rep)
    except _Undetermined as exc:
        code = EXIT_UNDETERMINED
        rep["error"] = str(exc)
    except (NotStabilized, Inconclusive) as exc:
        code = EXIT_UNDETERMINED
        rep["error"] = f"{type(exc).__name__}: {exc}"
    except (WlpkitError, OSError, ValueError) as exc:
        # bad input: unreadable file, malformed text, or data violating a precondition
        code = EXIT_INPUT
        rep["error"] = f"{type(exc).__name__}: {exc}"
    rep["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return code, rep


# --- output -------------------------------------------------------------------


def emit_json(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def parse_report(text: str) -> dict:
    return json.loads(text)


def emit_text(report, indent: int = 0) -> str:
    """Indented ``key: value`` rendering of the same content as the JSON report."""
    lines = []
    pad = "  " * indent
    for key, value in report.items():
        if isinstance(value, dict):
            if not value:
                lines.append(f"{pad}{key}: {{}}")
                continue
            lines.append(f"{pad}{key}:")
            lines.append(emit_text(value, indent + 1))
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            lines.append(f"{pad}{key}:")
            for v in value:
                lines.append(f"{pad}  - " + ", ".join(f"{k}={w}" for k, w in v.items()))
        elif isinstance(value, str) and "\n" in value:
            lines.append(f"{pad}{key}: |")
            lines.extend(f"{pad}  {ln}" for ln in value.rstrip("\n").splitlines())
        else:
            lines.append(f"{pad}{key}: {value if value is not None else '-'}")
    return "\n".join(lines)


def _int(text):
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlpkit", description="Lefschetz properties of artinian algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="ideal or matrix file")
        p.add_argument("--field", help="override the file's field, e.g. GF(3), GF(3^2), Q")
        p.add_argument("--seed", type=_int, default=DEFAULT_SEED)
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--exhaustive", action="store_true")
        p.add_argument("--max-degree", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--output", choices=("json", "text"), default="json")
        p.add_argument("--out", help="write the report (or JSONL records for search) here")
        return p

    for name in COMMANDS:
        p = common(sub.add_parser(name), with_input=name not in _NO_INPUT)
        if name in ("wlp",):
            p.add_argument("--table", action="store_true", help="include the per-form rank table")
        if name in ("jordan", "green"):
            p.add_argument("-L", "--form", help="linear form such as 'x+2*y'; default: general")
        if name in ("green", "truncate"):
            p.add_argument("-d", "--degree", type=int)
        if name == "compressed":
            p.add_argument("-e", "--socle-degree", type=int, required=True)
        if name == "fibers":
            p.add_argument("--decompose", action="store_true")
        if name == "search":
            p.add_argument("--timestamps", action="store_true", help="stamp records with wall-clock time")
            p.add_argument("--record-all", action="store_true", help="also write records for instances with the WLP")
    return parser


def config_from_args(args) -> RunConfig:
    keys = ("form", "degree", "socle_degree", "decompose", "timestamps", "record_all", "table")
    extras = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    if args.workers < 1:
        raise SystemExit("--workers must be positive")
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        field=args.field,
        seed=args.seed,
        trials=args.trials,
        max_degree=args.max_degree,
        exhaustive=args.exhaustive,
        workers=args.workers,
        output=args.output,
        out_path=args.out,
        options=extras,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    code, report = run_command(cfg)
    text = emit_json(report) if cfg.output == "json" else emit_text(report)
    if cfg.out_path and cfg.command != "search":
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if "error" in report:
        print(f"wlpkit: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
