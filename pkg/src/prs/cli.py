"""Command-line surface: encode, retrieve, analyze, simulate, bench.

Exit codes: 0 success, 1 retrieval failure, 2 validation / I-O / format
errors. Every command is deterministic given --seed (timings excluded).
The report-producing commands (analyze, simulate, bench) can render
matplotlib figures next to their JSON/CSV output via --plot.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from pathlib import Path

import numpy as np

from . import analytics, bench, codec, sim
from .codec import CodeParams, Shard, ShardFormatError, load_shard
from .gf import DEFAULT_PRIMITIVE_POLYS, FieldContext
from .retrieval import progressive_retrieve

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


class CliError(Exception):
    """Validation or I/O problem; reported with exit code 2."""


def _field(m: int, prim_poly: int | None) -> FieldContext:
    try:
        return FieldContext(m, prim_poly)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _params(m: int, k_hat: int, prim_poly: int | None) -> CodeParams:
    field = _field(m, prim_poly)
    try:
        return CodeParams(field, k_hat)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _parse_positions(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return sorted({int(tok) for tok in text.split(",") if tok.strip() != ""})
    except ValueError as exc:
        raise CliError(f"bad position list {text!r}") from exc


def cmd_encode(args) -> int:
    params = _params(args.m, args.khat, args.prim_poly)
    src = Path(args.input)
    if not src.is_file():
        raise CliError(f"input file not found: {src}")
    data = src.read_bytes()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    groups = codec.frame_payload(data, params)
    shards = codec.make_shards(groups, params, len(data))
    for shard in shards:
        shard.save(out_dir)
    manifest = {
        "m": params.m,
        "n": params.n,
        "k_hat": params.k_hat,
        "crc_width": params.crc_width,
        "prim_poly": params.field.prim_poly,
        "group_count": int(len(groups)),
        "payload_byte_len": len(data),
        "payload_crc32": f"{zlib.crc32(data):08x}",
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(shards)} shards ({len(groups)} groups) to {out_dir}")
    return EXIT_OK


def _read_shards(shard_dir: Path) -> tuple[dict[int, Shard], Shard]:
    paths = sorted(shard_dir.glob("shard_*.prs1"))
    if not paths:
        raise CliError(f"no shard_*.prs1 files in {shard_dir}")
    shards: dict[int, Shard] = {}
    ref = None
    for path in paths:
        try:
            shard = load_shard(path)
        except (ShardFormatError, OSError) as exc:
            print(f"skipping {path.name}: {exc}", file=sys.stderr)
            continue
        if ref is None:
            ref = shard
        elif (shard.m, shard.n, shard.k_hat, shard.crc_width,
              shard.group_count, shard.payload_byte_len) != (
                ref.m, ref.n, ref.k_hat, ref.crc_width,
                ref.group_count, ref.payload_byte_len):
            raise CliError(f"{path.name} disagrees with other shard headers")
        shards[shard.position] = shard
    if ref is None:
        raise CliError("no readable shards")
    return shards, ref


def cmd_retrieve(args) -> int:
    shard_dir = Path(args.shard_dir)
    if not shard_dir.is_dir():
        raise CliError(f"not a directory: {shard_dir}")
    shards, ref = _read_shards(shard_dir)
    prim = args.prim_poly
    manifest_path = shard_dir / "manifest.json"
    if prim is None and manifest_path.is_file():
        try:
            prim = json.loads(manifest_path.read_text()).get("prim_poly")
        except (json.JSONDecodeError, OSError):
            prim = None
    params = _params(ref.m, ref.k_hat, prim)

    crash = set(_parse_positions(args.crash_list))
    corrupt = _parse_positions(args.corrupt_list)
    rng = np.random.default_rng(np.random.SeedSequence((args.seed, 0xC0)))
    for pos in corrupt:
        if pos in shards:
            noise = rng.integers(1, params.n + 1, size=shards[pos].group_count)
            shards[pos].symbols = shards[pos].symbols ^ noise
    live = sorted(set(shards) - crash)
    if len(live) < params.k_hat:
        raise CliError(
            f"{len(live)} live shards < k_hat={params.k_hat}; cannot retrieve")

    report = progressive_retrieve(
        lambda pos: shards[pos].symbols, live, params,
        ref.payload_byte_len, rng_seed=args.seed)
    print(report.to_json())
    if not report.success:
        return EXIT_FAIL
    Path(args.out).write_bytes(report.payload)
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.p < 0 or args.p > 1:
        raise CliError(f"--p {args.p} outside [0, 1]")
    try:
        result = analytics.evaluate(args.n, args.khat, args.p, args.s)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = result.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        if args.plot:
            from . import figures
            figures.fig_analytic_pmf(result, Path(args.out).with_suffix(".png"))
    print(text)
    return EXIT_OK


def _check_n_matches_m(n: int, m: int):
    if n != (1 << m) - 1:
        raise CliError(f"--n {n} does not equal 2^{m} - 1")


def cmd_simulate(args) -> int:
    _check_n_matches_m(args.n, args.m)
    params = _params(args.m, args.khat, args.prim_poly)
    crash = frozenset()
    if args.s:
        rng = np.random.default_rng(np.random.SeedSequence((args.seed, 0x5)))
        crash = frozenset(
            int(j) for j in rng.choice(params.n, size=args.s, replace=False))
    model = sim.FailureModel(p_byz=args.p, crash_set=crash,
                             master_seed=args.seed)
    summary = sim.run_monte_carlo(params, model, args.trials)
    if args.out:
        Path(args.out).write_text(summary.to_json() + "\n")
    csv_path = Path(args.csv) if args.csv else (
        Path(args.out).with_suffix(".csv") if args.out else None)
    if csv_path:
        csv_path.write_text(summary.to_csv())
    print(summary.to_json())

    analytic = None
    if not args.s:
        analytic = analytics.evaluate(args.n, args.khat, args.p)
    if args.plot and (args.out or args.csv):
        from . import figures
        base = Path(args.out) if args.out else Path(args.csv)
        figures.fig_simulation_vs_analytic(summary, analytic,
                                           base.with_suffix(".png"))
    if args.check:
        problems = []
        if summary.silent_corruptions:
            problems.append(
                f"{summary.silent_corruptions} silent corruptions")
        if analytic is not None and summary.trials >= 1000:
            rel = abs(summary.mean_accesses - analytic.avg_accesses) \
                / analytic.avg_accesses
            if rel > 0.05:
                problems.append(
                    f"mean accesses off closed form by {rel:.1%}")
        if problems:
            print("CHECK FAILED: " + "; ".join(problems), file=sys.stderr)
            return EXIT_FAIL
        print("checks passed")
    return EXIT_OK


def cmd_bench(args) -> int:
    _check_n_matches_m(args.n, args.m)
    params = _params(args.m, args.khat, args.prim_poly)
    algorithms = tuple(tok.strip() for tok in args.algorithms.split(",") if tok)
    for alg in algorithms:
        if alg not in bench.ALGORITHMS:
            raise CliError(f"unknown algorithm {alg!r} "
                           f"(choose from {', '.join(bench.ALGORITHMS)})")
    try:
        p_values = [float(tok) for tok in str(args.p).split(",")]
    except ValueError as exc:
        raise CliError(f"bad --p value {args.p!r}") from exc
    rows = bench.run_bench(params, p_values, args.trials, args.seed, algorithms)
    text = bench.rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        if args.plot:
            from . import figures
            figures.fig_bench_breakdown(rows, Path(args.out).with_suffix(".png"))
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prs",
        description="Progressive Reed-Solomon storage codec, simulator and analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a file into n shard files")
    enc.add_argument("--input", required=True)
    enc.add_argument("--out-dir", required=True)
    enc.add_argument("--m", type=int, required=True)
    enc.add_argument("--khat", type=int, required=True)
    enc.add_argument("--prim-poly", type=lambda s: int(s, 0), default=None,
                     help="primitive polynomial override (hex ok)")
    enc.set_defaults(func=cmd_encode)

    ret = sub.add_parser("retrieve", help="progressively retrieve a shard directory")
    ret.add_argument("--shard-dir", required=True)
    ret.add_argument("--out", required=True)
    ret.add_argument("--seed", type=int, default=0)
    ret.add_argument("--corrupt-list", default=None,
                     help="comma-separated positions to corrupt before retrieval")
    ret.add_argument("--crash-list", default=None,
                     help="comma-separated positions to treat as crashed")
    ret.add_argument("--prim-poly", type=lambda s: int(s, 0), default=None)
    ret.set_defaults(func=cmd_retrieve)

    ana = sub.add_parser("analyze", help="closed-form access cost and success rate")
    ana.add_argument("--n", type=int, required=True)
    ana.add_argument("--khat", type=int, required=True)
    ana.add_argument("--p", type=float, required=True)
    ana.add_argument("--s", type=int, default=0)
    ana.add_argument("--out", default=None)
    ana.add_argument("--plot", action="store_true")
    ana.set_defaults(func=cmd_analyze)

    simulate = sub.add_parser("simulate", help="Monte-Carlo retrieval simulation")
    simulate.add_argument("--n", type=int, required=True)
    simulate.add_argument("--khat", type=int, required=True)
    simulate.add_argument("--m", type=int, required=True)
    simulate.add_argument("--p", type=float, required=True)
    simulate.add_argument("--trials", type=int, required=True)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--s", type=int, default=0)
    simulate.add_argument("--out", default=None)
    simulate.add_argument("--csv", default=None)
    simulate.add_argument("--check", action="store_true",
                          help="exit nonzero if invariants fail")
    simulate.add_argument("--plot", action="store_true")
    simulate.add_argument("--prim-poly", type=lambda s: int(s, 0), default=None)
    simulate.set_defaults(func=cmd_simulate)

    bch = sub.add_parser("bench", help="decoder benchmark with phase breakdown")
    bch.add_argument("--algorithms", default="ird,restart,genie")
    bch.add_argument("--n", type=int, required=True)
    bch.add_argument("--khat", type=int, required=True)
    bch.add_argument("--m", type=int, required=True)
    bch.add_argument("--p", required=True,
                     help="corruption probability, or comma-separated sweep")
    bch.add_argument("--trials", type=int, required=True)
    bch.add_argument("--seed", type=int, default=0)
    bch.add_argument("--out", default=None)
    bch.add_argument("--plot", action="store_true")
    bch.add_argument("--prim-poly", type=lambda s: int(s, 0), default=None)
    bch.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
