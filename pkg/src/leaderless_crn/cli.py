"""Command-line interface: ``leaderless-crn compile|simulate|check|bench``."""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, bench, corpus
from .checker import DEFAULT_NODE_BUDGET, check_stable_computation, check_stable_decision
from .compiler.top import DEFAULT_VALIDATION_BOUND, SpecValidationError, compile_spec
from .crn import Configuration, Crn, CrnError, CrnParseError, parse_crn, serialize_crn
from .kernels import default_kernel
from .kinetics import MassBoundError, StopRule, simulate, trajectory_csv
from .semilinear import SpecError, SpecParseError, parse_spec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_EVENT_CAP = 4
EXIT_REFUTED = 5
EXIT_INCONCLUSIVE = 6
EXIT_BAND = 7

OUT_DIR_ENV = "LEADERLESS_CRN_OUT"

GRAMMARS = """\
file formats
------------
.crn (UTF-8 text, one item per line, '#' starts a comment):
  species: S1, S2, ...        optional; every species used must be listed if present
  inputs: X1, X2, ...
  outputs: Y1, ...
  yesvoters: L1, ...          optional; makes the CRN a decider
  [m] A [+ [m] B] -> [m] C + ...   reaction with 1 or 2 reactant molecules;
                                   coefficient defaults to 1, '0' is the empty side
  Species names match [A-Za-z_^'][A-Za-z0-9_^']*. Serialization is canonical:
  headers in the order above, species sorted, terms sorted by name.

.fnspec (JSON): ordered affine pieces; the first piece whose domain holds wins
  {"name": "...", "arity_in": k, "arity_out": l,
   "pieces": [{"coeff": [[n_11..n_1l], ..., [n_k1..n_kl]], "denom": [d_1..d_l],
               "b": [b_1..b_l], "c": [c_1..c_k], "domain": FORMULA}, ...]}
  piece value: y_j = b_j + (1/d_j) * sum_i n_ij (x_i - c_i)
  FORMULA := (ge a_1..a_k t)         sum a_i x_i >= t
           | (mod a_1..a_k m r)      sum a_i x_i = r (mod m)
           | (and F ...) | (or F ...) | (not F)

Bundled examples may be named instead of a path: %(crns)s; %(specs)s.

randomness
----------
Every run takes one --seed. A single simulation uses
PCG64(SeedSequence(seed)); bench trial t at size n uses
PCG64(SeedSequence(seed, spawn_key=(n, t))).

exit codes
----------
0 ok/certified, 2 parse error, 3 spec validation failure, 4 event cap reached,
5 refuted, 6 inconclusive, 7 bench band violation.

Artifacts go to --out-dir, or to $%(env)s, or to the current directory.
"""


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _out_dir(args) -> Path:
    base = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or ".")
    base.mkdir(parents=True, exist_ok=True)
    return base


def _header(args, argv: Sequence[str]) -> list[str]:
    return [
        f"leaderless_crn {__version__}",
        f"seed={getattr(args, 'seed', '')} kernel={getattr(args, 'kernel', None) or default_kernel()}",
        "argv=" + " ".join(shlex.quote(a) for a in argv),
    ]


def _read_text(source: str, suffix: str) -> tuple[str, str]:
    path = Path(source)
    if path.is_file():
        return path.read_text(encoding="utf-8"), path.stem
    try:
        text = corpus.crn_text(source) if suffix == ".crn" else corpus.spec_text(source)
    except KeyError:
        raise CliError(f"{source}: no such file or bundled {suffix}", EXIT_USAGE) from None
    return text, source


def _load_crn(source: str) -> tuple[Crn, str, Optional[dict]]:
    text, stem = _read_text(source, ".crn")
    try:
        crn = parse_crn(text)
    except CrnParseError as exc:
        raise CliError(f"{source}: {exc}", EXIT_PARSE) from None
    meta = None
    sidecar = Path(source).with_suffix(".meta.json")
    if sidecar.is_file():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    return crn, stem, meta


def parse_assignments(text: str, what: str = "--in") -> dict[str, int]:
    """``X1=5,X2=3`` to a dict; whitespace is ignored."""
    out: dict[str, int] = {}
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        name, eq, value = part.partition("=")
        name = name.strip()
        if not eq or not name:
            raise CliError(f"{what}: expected NAME=COUNT, got {part!r}", EXIT_USAGE)
        try:
            n = int(value)
        except ValueError:
            raise CliError(f"{what}: count for {name} is not an integer", EXIT_USAGE) from None
        if n < 0:
            raise CliError(f"{what}: count for {name} is negative", EXIT_USAGE)
        if name in out:
            raise CliError(f"{what}: {name} given twice", EXIT_USAGE)
        out[name] = n
    return out


def _initial(crn: Crn, text: str) -> Configuration:
    counts = parse_assignments(text)
    extra = sorted(set(counts) - set(crn.inputs))
    if extra:
        raise CliError(f"--in: not input species: {', '.join(extra)}", EXIT_USAGE)
    return Configuration(counts)


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"{what}: expected comma-separated integers", EXIT_USAGE) from None


# subcommands -------------------------------------------------------------

def cmd_compile(args, argv) -> int:
    text, stem = _read_text(args.spec, ".fnspec")
    try:
        spec = parse_spec(text)
    except SpecParseError as exc:
        raise CliError(f"{args.spec}: {exc}", EXIT_PARSE) from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            compiled = compile_spec(spec, validation_bound=args.bound)
        except SpecValidationError as exc:
            raise CliError(f"{args.spec}: {exc}", EXIT_VALIDATION) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = Path(args.output) if args.output else _out_dir(args) / f"{stem}.crn"
    out.parent.mkdir(parents=True, exist_ok=True)
    header = "".join(f"# {line}\n" for line in _header(args, argv))
    out.write_text(header + serialize_crn(compiled.crn), encoding="utf-8")
    meta = compiled.metadata()
    meta["argv"] = list(argv)
    out.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} and {out.with_suffix('.meta.json')}")
    print(f"species: {len(compiled.crn.species)}")
    print(f"reactions: {len(compiled.crn.reactions)}")
    print(f"gamma: {compiled.gamma}")
    return EXIT_OK


def cmd_simulate(args, argv) -> int:
    crn, stem, meta = _load_crn(args.crn)
    init = _initial(crn, args.inputs)
    n = init.size()
    gamma = meta.get("gamma") if meta else None
    if args.volume is not None:
        volume = args.volume
    else:
        volume = float(gamma * max(1, n)) if gamma else float(max(1, n))
    try:
        stop = StopRule.parse(args.stop, n)
        if args.max_events is not None:
            stop = StopRule(stop.horizon, args.max_events, stop.silence)
    except ValueError as exc:
        raise CliError(f"--stop: {exc}", EXIT_USAGE) from None
    try:
        traj = simulate(crn, init, volume, stop, seed=args.seed, record=args.record != "final",
                        mass_bound=None if args.no_mass_check else gamma, kernel=args.kernel)
    except MassBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUTED
    header = _header(args, argv) + [
        f"volume={volume!r} stop={stop.describe()} record={args.record}",
        f"initial={dict(init)}",
        f"status={traj.status} events={traj.n_events} time={traj.time!r}",
    ]
    out = Path(args.output) if args.output else _out_dir(args) / f"{stem}.seed{args.seed}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(trajectory_csv(traj, args.record, header), encoding="utf-8")
    print(f"trajectory: {out}")
    print(f"status: {traj.status}")
    print(f"events: {traj.n_events}")
    print(f"time: {traj.time:.6g}")
    print(f"stabilization time: {traj.last_change:.6g}")
    print(f"final: {traj.final}")
    if crn.is_decider and not crn.outputs:
        vote = crn.vote(traj.final)
        print("vote: " + {True: "yes", False: "no", None: "undefined"}[vote])
    else:
        print("outputs: " + ", ".join(f"{y}={traj.final[y]}" for y in crn.outputs))
    return EXIT_EVENT_CAP if traj.status == "event_cap" else EXIT_OK


def cmd_check(args, argv) -> int:
    crn, _, meta = _load_crn(args.crn)
    init = _initial(crn, args.inputs)
    if args.budget < 1:
        raise CliError("--budget must be positive", EXIT_USAGE)
    expect = args.expect.strip()
    try:
        if expect.lower() in ("yes", "no", "true", "false"):
            if crn.yes_voters is None:
                raise CliError("--expect yes/no needs a CRN with yesvoters", EXIT_USAGE)
            verdict = check_stable_decision(crn, init, expect.lower() in ("yes", "true"),
                                            args.budget, kernel=args.kernel)
        else:
            want = parse_assignments(expect, "--expect")
            extra = sorted(set(want) - set(crn.outputs))
            if extra:
                raise CliError(f"--expect: not output species: {', '.join(extra)}", EXIT_USAGE)
            expected = [want.get(y, 0) for y in crn.outputs]
            gamma = meta.get("gamma") if meta else None
            verdict = check_stable_computation(crn, init, expected, args.budget,
                                               mass_bound=gamma, kernel=args.kernel)
    except (OverflowError, MassBoundError) as exc:
        print(f"verdict: inconclusive\nreason: {exc}")
        return EXIT_INCONCLUSIVE
    out = verdict.report()
    if verdict.kind == "refuted" and verdict.witness:
        out += "witness reactions:\n" + "".join(
            f"  {i}: {crn.reactions[i]}\n" for i in verdict.witness
        )
    print(out, end="")
    return {"certified": EXIT_OK, "refuted": EXIT_REFUTED}.get(verdict.kind, EXIT_INCONCLUSIVE)


def cmd_bench(args, argv) -> int:
    sizes = _ints(args.sizes, "--sizes")
    target = args.target
    common = dict(seed=args.seed, workers=args.workers, kernel=args.kernel)
    try:
        if target in bench.PATTERNS:
            kw = dict(common)
            if args.trials:
                kw["trials"] = args.trials
            report = bench.PATTERNS[target](sizes, **kw)
        else:
            text, _ = _read_text(target, ".fnspec")
            try:
                spec = parse_spec(text)
            except SpecParseError as exc:
                raise CliError(f"{target}: {exc}", EXIT_PARSE) from None
            ray = _ints(args.ray, "--ray") if args.ray else None
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                report = bench.bench_compiled(spec, sizes, args.trials or 100, ray=ray, **common)
    except SpecValidationError as exc:
        raise CliError(f"{target}: {exc}", EXIT_VALIDATION) from None
    except bench.BenchOutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAND
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    report.meta["argv"] = " ".join(shlex.quote(a) for a in argv)
    base = _out_dir(args)
    stem = target if target in bench.PATTERNS else Path(target).stem
    paths = {
        "samples": base / f"bench_{stem}.csv",
        "summary": base / f"bench_{stem}.json",
        "gnuplot": base / f"bench_{stem}.dat",
    }
    paths["samples"].write_text(report.samples_csv(), encoding="utf-8")
    paths["summary"].write_text(report.summary_json(), encoding="utf-8")
    paths["gnuplot"].write_text(report.gnuplot_data(), encoding="utf-8")
    print(report.text(), end="")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return EXIT_OK if report.ok else EXIT_BAND


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    epilog = GRAMMARS % {
        "crns": ", ".join(corpus.crn_names()),
        "specs": ", ".join(corpus.spec_names()),
        "env": OUT_DIR_ENV,
    }
    p = argparse.ArgumentParser(
        prog="leaderless-crn",
        description="Compile semilinear functions to leaderless CRNs, simulate them, "
                    "check stable computation, and benchmark running time.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, seed=True):
        sp.add_argument("--out-dir", help=f"artifact directory (default ${OUT_DIR_ENV} or .)")
        sp.add_argument("--kernel", choices=("compiled", "python"),
                        help="simulation/exploration kernel (default: compiled if built)")
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")

    c = sub.add_parser("compile", help="compile a .fnspec into a .crn plus metadata sidecar",
                       epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("spec", help=".fnspec path or bundled spec name")
    c.add_argument("-o", "--output", help="output .crn path")
    c.add_argument("--bound", type=int, default=DEFAULT_VALIDATION_BOUND,
                   help="validate coverage and integrality on [0, B]^k (default %(default)s)")
    common(c, seed=False)
    c.set_defaults(func=cmd_compile, seed=None)

    s = sub.add_parser("simulate", help="run the stochastic simulation algorithm",
                       epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("crn", help=".crn path or bundled CRN name")
    s.add_argument("--in", dest="inputs", default="", metavar="X1=5,X2=3",
                   help="input counts; unlisted inputs are 0")
    s.add_argument("--volume", type=float,
                   help="volume (default gamma*n from a .meta.json sidecar, else n)")
    s.add_argument("--stop", default="quiescence",
                   help="comma-joined: quiescence | horizon=T | events=N | silence[=W] "
                        "(W defaults to 50 * initial molecules)")
    s.add_argument("--max-events", type=int, help="event cap (default 50000000)")
    s.add_argument("--record", choices=("full", "sparse", "final"), default="full",
                   help="trajectory CSV layout (default %(default)s)")
    s.add_argument("--no-mass-check", action="store_true",
                   help="skip the gamma*n mass-bound assertion for compiled CRNs")
    s.add_argument("-o", "--output", help="trajectory CSV path")
    common(s)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("check", help="certify or refute stable computation by exhaustive search",
                       epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    k.add_argument("crn", help=".crn path or bundled CRN name")
    k.add_argument("--in", dest="inputs", default="", metavar="X=3", help="input counts")
    k.add_argument("--expect", required=True, metavar="Y=4|yes|no",
                   help="expected outputs (unlisted are 0) or decision")
    k.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET,
                   help="node budget (default %(default)s)")
    common(k, seed=False)
    k.set_defaults(func=cmd_check, seed=None)

    b = sub.add_parser("bench", help="timing benchmarks with scaling fits",
                       epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("target", help=f"pattern ({', '.join(bench.PATTERNS)}) or .fnspec path/name")
    b.add_argument("--sizes", default="100,1000", help="comma-separated n (default %(default)s)")
    b.add_argument("--trials", type=int, help="trials per size (default 500, compiled 100)")
    b.add_argument("--ray", help="input direction for a spec, e.g. 1,2 (default all ones)")
    b.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    common(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, ["leaderless-crn", *argv])
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (CrnError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
