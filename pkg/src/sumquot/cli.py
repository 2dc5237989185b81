"""Command line entry point: ``sumquot <command> [options]``.

Commands: oracle, born, certify, curves-verify, egt, corpus.  Reports go to
stdout as JSON (canonical), CSV (one header row, one value row) or text.
Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from sumquot import curves, egtgraph, oracle, pipeline
from sumquot.errors import InputError, InvariantViolation
from sumquot.ratcore import RatSet, as_rational, ratio_set

SCHEMA_VERSION = "1"
COMMANDS = ("oracle", "born", "certify", "curves-verify", "egt", "corpus")

_TOKEN = re.compile(r"^[+-]?\d+(/\d+)?$")


# -- input --------------------------------------------------------------------------


def parse_text(text: str) -> RatSet:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not _TOKEN.match(line):
            raise InputError(f"line {lineno}: malformed rational {line!r}")
        if "/" in line and int(line.split("/")[1]) == 0:
            raise InputError(f"line {lineno}: zero denominator")
        values.append(Fraction(line))
    return RatSet(values)


def parse_input(path) -> RatSet:
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())


def format_set(A: RatSet) -> str:
    return "".join(f"{a}\n" for a in A)


def input_digest(A: Optional[RatSet]) -> str:
    text = format_set(A) if A is not None else ""
    return hashlib.sha256(text.encode()).hexdigest()


def generate_corpus(kind: str, n: int, seed: int = 0, **params) -> RatSet:
    """ap(start, step), gp(start, ratio) or random(range) with n elements."""
    if n < 1:
        raise InputError("corpus size n must be >= 1")
    if kind == "ap":
        start, step = as_rational(params.get("start", 1)), as_rational(params.get("step", 1))
        if step <= 0:
            raise InputError("ap step must be positive")
        return RatSet(start + i * step for i in range(n))
    if kind == "gp":
        start, ratio = as_rational(params.get("start", 1)), as_rational(params.get("ratio", 2))
        if ratio <= 0 or ratio == 1:
            raise InputError("gp ratio must be positive and != 1")
        return RatSet(start * ratio ** i for i in range(n))
    if kind == "random":
        hi = int(params.get("range", 100))
        if hi < n:
            raise InputError(f"cannot draw {n} distinct values from 1..{hi}")
        return RatSet(random.Random(seed).sample(range(1, hi + 1), n))
    raise InputError(f"unknown corpus kind {kind!r}")


# -- report -------------------------------------------------------------------------


@dataclass
class Report:
    command: str
    input_digest: str
    n: Optional[int] = None
    ratio_set_size: Optional[int] = None
    oracle_size: Optional[int] = None
    born_count: Optional[int] = None
    pipeline_count: Optional[int] = None
    mode: Optional[str] = None
    tau: Optional[int] = None
    S_size: Optional[int] = None
    M: Optional[int] = None
    N: Optional[int] = None
    cluster_count: Optional[int] = None
    conditions: List[dict] = field(default_factory=list)
    timing_ms: int = 0
    details: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def as_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "input_digest": self.input_digest,
            "n": self.n,
            "ratio_set_size": self.ratio_set_size,
            "oracle_size": self.oracle_size,
            "born_count": self.born_count,
            "pipeline_count": self.pipeline_count,
            "mode": self.mode,
            "tau": self.tau,
            "S_size": self.S_size,
            "M": self.M,
            "N": self.N,
            "cluster_count": self.cluster_count,
            "conditions": self.conditions,
            "timing_ms": self.timing_ms,
            "details": self.details,
        }


def _flat(d: dict) -> dict:
    row = {}
    for key, val in d.items():
        if key == "conditions":
            row[key] = ";".join(f"{c['id']}:{c['status']}" for c in val)
        elif key == "details":
            for dk, dv in val.items():
                row[f"details.{dk}"] = dv if isinstance(dv, (int, str)) or dv is None else json.dumps(dv, sort_keys=True)
        else:
            row[key] = val
    return {k: ("" if v is None else v) for k, v in row.items()}


def render(report: Report, fmt: str) -> str:
    data = report.as_dict()
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        row = _flat(data)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buf.getvalue()
    lines = []
    for key, val in _flat(data).items():
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------


def _conditions(conds) -> List[dict]:
    return [{"id": c.id, "status": c.status} for c in conds]


def _load(args) -> RatSet:
    if not args.input:
        raise InputError(f"{args.command} needs --input PATH")
    return parse_input(args.input)


def _check_sound(A: RatSet, witnesses) -> None:
    bad = oracle.missing_witnesses(A, witnesses)
    if bad:
        raise InvariantViolation(f"{len(bad)} witnesses outside (A+A)/(A+A), e.g. {bad[0]}")


def cmd_oracle(args) -> Report:
    A = _load(args)
    if len(A) > args.max_n:
        raise InputError(f"|A|={len(A)} exceeds --max-n {args.max_n}")
    rep = oracle.bound_report(A)
    if not rep.antal_lhs_ok:
        raise InvariantViolation(f"quotient size {rep.quotient_size} below 2n^2-1")
    return Report(
        "oracle", input_digest(A), n=rep.n, ratio_set_size=rep.ratio_set_size,
        oracle_size=rep.quotient_size,
        details={"antal_lhs_ok": rep.antal_lhs_ok, "main1_ratio": rep.main1_ratio},
    )


def cmd_born(args) -> Report:
    A = _load(args)
    if len(A) == 0:
        raise InputError("empty input set")
    out = pipeline.certify_born(A)
    report = Report("born", input_digest(A), n=len(A), ratio_set_size=len(ratio_set(A)),
                    born_count=out.count, mode=out.mode)
    if len(A) <= args.max_n:
        _check_sound(A, out.witnesses)
        report.oracle_size = oracle.quotient_size(A)
    return report


def cmd_certify(args) -> Report:
    A = _load(args)
    out = pipeline.certify_full(
        A, M=args.override_M, N=args.override_N, c_M=args.c_M, c_N=args.c_N,
        C=args.C, C_prime=args.C_prime, seed=args.seed,
    )
    born = pipeline.certify_born(A)
    sel = out.selection
    report = Report(
        "certify", input_digest(A), n=len(A), ratio_set_size=len(ratio_set(A)),
        born_count=born.count, pipeline_count=out.count, mode=out.mode,
        tau=sel.tau if sel else None, S_size=len(sel.S) if sel else None,
        M=out.M, N=out.N, cluster_count=len(out.per_cluster),
        conditions=_conditions(out.conditions),
        details={
            "reason": out.reason,
            "regime_ok": out.regime_ok,
            "clusters": [
                {"index": c.index, "band": [str(c.band[0]), str(c.band[1])], "witnesses": c.witnesses,
                 "main_exact": c.main_exact, "main_tau": c.main_tau, "error_sum": c.error_sum,
                 "rep_tag": c.rep_tag, "P_size": c.P_size, "cross_max": c.cross_max, "same_max": c.same_max}
                for c in out.per_cluster
            ],
        },
    )
    if len(A) <= args.max_n:
        _check_sound(A, out.witnesses)
        report.oracle_size = oracle.quotient_size(A)
    return report


def _random_lprime_instance(rng: random.Random, grid_max: int):
    pool = rng.sample(range(1, 40), 4)
    lam = [Fraction(p, rng.randint(1, 6)) for p in pool]
    lam1, lam2 = (lam[0], lam[0]) if rng.random() < 0.25 else (lam[0], lam[1])
    lam3, lam4 = lam[2], lam[3]
    if len({lam1, lam2} | {lam3, lam4}) < len({lam1, lam2}) + 2 or lam3 == lam4:
        return None
    gx = rng.randint(2, grid_max)
    gy = rng.randint(2, grid_max)
    xs = RatSet(Fraction(v, rng.randint(1, 3)) for v in rng.sample(range(1, 30), gx))
    ys = RatSet(Fraction(v, rng.randint(1, 3)) for v in rng.sample(range(1, 30), gy))
    av = rng.sample(range(1, 20), rng.randint(2, 6))
    bv = rng.sample(range(1, 20), rng.randint(2, 6))
    params = {(Fraction(a), Fraction(b)) for a in av for b in bv}
    # plant curves through random pairs of grid points so incidences occur
    grid = [(x, y) for x in xs for y in ys]
    for _ in range(rng.randint(2, 8)):
        p, q = rng.sample(grid, 2)
        for a, b in curves.curves_through_pair_Lprime(p, q, (lam1, lam2, lam3, lam4)):
            if a is not None and a > 0 and b > 0:
                params.add((a, b))
    family = [curves.CurveLPrime(a, b, lam1, lam2, lam3, lam4) for a, b in sorted(params)]
    return family, curves.PointGrid(xs, ys)


def lprime_instances(count: int, seed: int, grid_max: int = 12):
    """Seeded random L' families over grids up to grid_max x grid_max."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = _random_lprime_instance(rng, grid_max)
        if inst is not None:
            out.append(inst)
    return out


def cmd_curves_verify(args) -> Report:
    checked = violations = max_cp = max_pp = 0
    if args.family == "L":
        A = _load(args)
        M = args.override_M or 8
        N = args.override_N or 2
        digest = input_digest(A)
        instances = [(fam, grid) for _, _, fam, grid in pipeline.incidence_instances(A, M, N)]
    else:
        A = None
        digest = input_digest(None)
        instances = lprime_instances(args.instances, args.seed, args.grid)
    for family, grid in instances:
        rep = curves.verify_ps_conditions(family, grid)
        checked += 1
        violations += len(rep.violations)
        max_cp = max(max_cp, rep.max_curve_pair)
        max_pp = max(max_pp, rep.max_point_pair)
    return Report(
        "curves-verify", digest, n=len(A) if A is not None else None,
        details={"family": args.family, "instances": checked, "violations": violations,
                 "max_curve_pair": max_cp, "max_point_pair": max_pp,
                 "bound": 1 if args.family == "L" else 2},
    )


def _kv(tokens) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise InputError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def cmd_egt(args) -> Report:
    params = _kv(args.params)
    try:
        r, k = int(params.get("r", 3)), int(params.get("k", 4))
    except ValueError:
        raise InputError("r and k must be integers") from None
    if args.random:
        g = egtgraph.random_dense_graph(r, k, args.seed)
        kind = "random"
    else:
        g = egtgraph.tightness_construction(r, k)
        kind = "tightness"
    dens = egtgraph.densities(g)
    cond = egtgraph.egt_condition(g) if r >= 2 else None
    exact = egtgraph.backtrack_transversal_clique(g)
    sampled = egtgraph.sample_transversal_clique(g, args.seed, args.max_tries)
    if sampled is not None and exact is None:
        raise InvariantViolation("sampler found a clique that backtracking missed")
    return Report(
        "egt", input_digest(None),
        details={
            "graph": kind, "r": r, "k": k,
            "densities": [[i, j, v] for (i, j), v in sorted(dens.items())],
            "min_density": min(dens.values(), default=0),
            "egt_condition": {True: "true", False: "false", None: "indeterminate"}[cond],
            "clique": "present" if exact is not None else "absent",
            "clique_picks": list(exact.picks) if exact is not None else None,
            "sampler_tries": sampled.tries if sampled is not None else None,
        },
    )


def cmd_corpus(args) -> Report:
    params = _kv(args.params)
    n = int(params.pop("n", 8))
    A = generate_corpus(args.kind, n, args.seed, **params)
    return Report("corpus", input_digest(A), n=len(A),
                  details={"kind": args.kind, "elements": [str(a) for a in A]})


HANDLERS = {
    "oracle": cmd_oracle,
    "born": cmd_born,
    "certify": cmd_certify,
    "curves-verify": cmd_curves_verify,
    "egt": cmd_egt,
    "corpus": cmd_corpus,
}


# -- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return as_rational(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _u64(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH")
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--override-M", dest="override_M", type=int)
    common.add_argument("--override-N", dest="override_N", type=int)
    common.add_argument("--c-M", dest="c_M", type=_fraction, default=pipeline.DEFAULT_C_M)
    common.add_argument("--c-N", dest="c_N", type=_fraction, default=pipeline.DEFAULT_C_N)
    common.add_argument("--C", dest="C", type=_fraction)
    common.add_argument("--C-prime", dest="C_prime", type=_fraction)
    common.add_argument("--max-n", dest="max_n", type=int, default=64)
    common.add_argument("--timing", action="store_true", help="fill timing_ms (breaks byte-determinism)")

    parser = _Parser(prog="sumquot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("oracle", "born", "certify"):
        sub.add_parser(name, parents=[common])
    cv = sub.add_parser("curves-verify", parents=[common])
    cv.add_argument("--family", choices=("L", "Lprime"), default="L")
    cv.add_argument("--instances", type=int, default=200)
    cv.add_argument("--grid", type=int, default=12)
    egt = sub.add_parser("egt", parents=[common])
    mode = egt.add_mutually_exclusive_group()
    mode.add_argument("--tightness", action="store_true")
    mode.add_argument("--random", action="store_true")
    egt.add_argument("--max-tries", dest="max_tries", type=int, default=10_000)
    egt.add_argument("params", nargs="*", metavar="r=R k=K")
    corpus = sub.add_parser("corpus", parents=[common])
    corpus.add_argument("kind", choices=("ap", "gp", "random"))
    corpus.add_argument("params", nargs="*", metavar="key=value")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("sumquot: --threads must be >= 1", file=sys.stderr)
        return 1
    start = time.perf_counter()
    try:
        report = HANDLERS[args.command](args)
    except InvariantViolation as exc:
        print(f"sumquot: invariant violation: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError, ValueError) as exc:
        print(f"sumquot: {exc}", file=sys.stderr)
        return 1
    if args.timing:
        report.timing_ms = int((time.perf_counter() - start) * 1000)
    if args.command == "corpus" and args.format == "text":
        stdout.write("".join(f"{e}\n" for e in report.details["elements"]))
    else:
        stdout.write(render(report, args.format))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
