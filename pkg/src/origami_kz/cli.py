"""Command-line front end.

Exit codes: 0 certified, 2 not certified (or certificate rejected), 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from origami_kz import fixtures as F
from origami_kz.certify import (
    CERTIFIED,
    SKIPPED,
    STAGES,
    Pipeline,
    PipelineError,
    RunConfig,
    StageFailure,
    certify_all,
    dumps,
    run_stage,
    verify_report,
)
from origami_kz.origami import OrbitGraph, Origami, OrigamiError, parse_origami
from origami_kz.perm import PermutationError
from origami_kz.words import WordError

EXIT_OK, EXIT_ERROR, EXIT_NOT_CERTIFIED = 0, 1, 2
BUILTIN = {"o1": f"h={F.O1_H}; v={F.O1_V}; n=9", "torus": "h=(1); v=(1); n=1"}
INPUT_ERRORS = (OrigamiError, PermutationError, WordError, ValueError)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="origami-kz",
        description="Certify SL(2,Z)-orbit, Veech group and Kontsevich-Zorich monodromy data of an origami.")
    p.add_argument("origami", nargs="?", help='inline origami, e.g. "h=(1,2)(3); v=(1,3)(2); n=3"')
    p.add_argument("--input", type=Path, help="origami text file (or a report JSON for --stage verify)")
    p.add_argument("--builtin", choices=sorted(BUILTIN), help="use a bundled origami")
    p.add_argument("--stage", default="certify-all", choices=("certify-all",) + STAGES + ("verify",))
    p.add_argument("--max-syllables", type=int, default=10, help="unipotent word search bound")
    p.add_argument("--density-depth", type=int, default=2,
                   help="closed-word depth for density candidates beyond the named ones")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--cache-dir", type=Path, help="store/load per-stage results under this directory")
    p.add_argument("--dot", type=Path, help="also write the orbit graph in DOT format")
    return p


def _load_origami(args) -> Origami:
    sources = [x for x in (args.origami, args.input, args.builtin) if x is not None]
    if len(sources) != 1:
        raise PipelineError("give exactly one of: inline origami, --input, --builtin")
    if args.builtin:
        text = BUILTIN[args.builtin]
    elif args.input:
        text = args.input.read_text()
    else:
        text = args.origami
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    return parse_origami(";".join(ln for ln in lines if ln.strip()))


# ---------------------------------------------------------------- text rendering

def _matrix(m, indent: str = "    ") -> list[str]:
    width = max((len(str(x)) for r in m for x in r), default=1)
    return [indent + "[" + " ".join(str(x).rjust(width) for x in r) + "]" for r in m]


def _render_stage(name: str, d: dict) -> list[str]:
    out = [f"== {name}: {d['status']}"]
    if "note" in d:
        out.append(f"  {d['note']}")
    for problem in d.get("problems", []):
        out.append(f"  problem: {problem}")
    if d["status"] == SKIPPED:
        return out
    if name == "stratum":
        out += [f"  origami: {d['origami']}", f"  commutator: {d['commutator']}",
                f"  stratum: {d['stratum']}, genus {d['genus']}"]
    elif name == "orbit":
        out.append(f"  orbit size: {d['size']}, cusps: {len(d['cusps'])} {d['cusps']}")
        for i, node in enumerate(d["graph"]["nodes"][:12]):
            out.append(f"  node {i}: h={node['h']}; v={node['v']}")
    elif name == "veech":
        out.append(f"  index {d['index']}, cusps {d['cusp_count']}, "
                   f"{len(d['schreier_generators'])} Schreier generators")
        for g in d["schreier_generators"][:12]:
            out.append(f"    {g['word']:<24} {g['matrix']}")
        for k, g in d.get("named_generators", {}).items():
            out.append(f"  {k} = {g['word']} = {g['matrix']} stabilizes: {g['stabilizes']}")
    elif name == "homology":
        out.append(f"  genus {d['genus']}; basis: {d['basis_source']}; <Sigma0,Z0> = {d['tautological_pairing']}")
        if d["omega"]:
            out.append("  intersection form on H_1^(0):")
            out += _matrix(d["omega"])
        out.append(f"  homological dimension: {d['homological_dimension']}")
    elif name == "kz":
        for k, m in list(d["monodromy"].items())[:8]:
            out.append(f"  rho({k}), {k} = {m['word']}:")
            out += _matrix(m["rho"]) if m["rho"] else ["    (empty)"]
        for k, m in d.get("elementary", {}).items():
            out.append(f"  {k}:")
            out += _matrix(m)
    elif name == "pinching":
        c = d["certificate"]
        for key in ("first", "second"):
            p = c.get(key)
            if p:
                out.append(f"  {p['word']}: {p['char_poly']['text']}; Delta1 = {p['delta1_factored']}, "
                           f"Delta2 = {p['delta2_factored']}; {p['verdict']}")
        for x in c["cross_products"]:
            out.append(f"  {x['pair']} = {x['value']} (non-square: {x['nonsquare']})")
        out.append(f"  {c['verdict']}: {c['report']}")
    elif name == "arithmeticity":
        for key in ("A", "B"):
            out += [f"  {key} ="] + _matrix(d[key])
        s = d["search"]
        out.append(f"  word search (<= {s['max_syllables']} syllables): {len(s['hits'])} words w with P w P e1 = e1")
        u = d["unipotent"]
        for k, w in u.get("words", {}).items():
            out.append(f"    {k} = P {w} P")
        for e in u.get("elements", []):
            out.append(f"  root {e['root']} with parameter {e['parameter']}:")
            out += _matrix(e["matrix"])
        if "note" in u:
            out.append(f"  {u['note']}")
        kw = d["kernel_witness"]
        out.append(f"  kernel word {kw['word']}: SL(2,Z) image {kw['sl2']}, {kw['verdict']}")
        out.append(f"  verdict: {d['verdict']['verdict']}")
    elif name == "pingpong":
        c = d["certificate"]
        out.append(f"  orders {c['orders']}; X = {c['table']['X']}; Y = {c['table']['Y']}")
        for inc in c["inclusions"]:
            out.append(f"    {inc['generator']}({inc['source']}) in {' u '.join(inc['targets'])}")
        for f in c["failures"]:
            out.append(f"    FAILED: {f}")
        for m in d["membership"]:
            out.append(f"  {m['schreier_word']:<20} = {m['normal_form']}")
        out.append(f"  verdict: {c['verdict']}")
    return out


def render_text(report: dict) -> str:
    lines = []
    for name, d in report["stages"].items():
        lines += _render_stage(name, d)
    lines.append(f"status: {report['status']}")
    if "verdict" in report:
        lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _verify(args) -> int:
    if args.input is None:
        raise PipelineError("--stage verify needs --input <report.json>")
    doc = json.loads(args.input.read_text())
    res = verify_report(doc)
    if args.format == "json":
        text = dumps({"verified": res.ok, "checked": res.checked, "problems": res.problems})
    else:
        text = "".join(f"ok: {s}\n" for s in res.checked) + "".join(f"FAIL: {p}\n" for p in res.problems)
        text += "certificate verified\n" if res.ok else "certificate rejected\n"
    _emit(text, args.out)
    return EXIT_OK if res.ok else EXIT_NOT_CERTIFIED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stage = "parse"
    try:
        if args.stage == "verify":
            stage = "verify"
            return _verify(args)
        o = _load_origami(args)
        stage = args.stage
        cfg = RunConfig(o, max_syllables=args.max_syllables, density_depth=args.density_depth,
                        cache_dir=args.cache_dir)
        pipe = Pipeline(cfg)
        report = certify_all(cfg, pipe) if stage == "certify-all" else run_stage(cfg, stage, pipe)
        if args.dot is not None:
            args.dot.write_text(OrbitGraph.from_json(pipe.need("orbit")["graph"]).to_dot())
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PipelineError, OSError, json.JSONDecodeError, *INPUT_ERRORS) as exc:
        print(f"error in stage {stage}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(dumps(report) if args.format == "json" else render_text(report), args.out)
    return EXIT_OK if report["status"] == CERTIFIED else EXIT_NOT_CERTIFIED


if __name__ == "__main__":
    sys.exit(main())
