"""Command-line interface: build, query, stats, bench (and a hidden oracle)."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
import tracemalloc
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import queries
from .builder import PfpIndex, build_index
from .corpus import read_fasta
from .errors import PfpError
from .oracle import oracle_build
from .parser import DEFAULT_P, DEFAULT_W, TriggerConfig, parse_text, prepare_text
from .pfpfiles import read_pfp, write_pfp
from .serialize import component_sizes, dumps, load_index, loads

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

QUERY_KINDS = ("sa", "isa", "lcp", "lce", "bwt", "access", "rmq")
PAIR_KINDS = ("lce", "rmq")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# stats


@dataclass
class StatsReport:
    n: int
    sigma: int
    m: int
    dict_phrases: int
    dict_total_len: int
    r: int
    n_over_r: float
    component_sizes: dict[str, int] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str]]:
        out = [(k, str(v)) for k, v in asdict(self).items() if k != "component_sizes"]
        out[-1] = ("n_over_r", f"{self.n_over_r:.2f}")
        out += [(f"size.{k}", str(v)) for k, v in self.component_sizes.items()]
        out.append(("size.total", str(sum(self.component_sizes.values()))))
        return out

    def as_text(self) -> str:
        rows = self.rows()
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)

    def as_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([k for k, _ in rows])
        writer.writerow([v for _, v in rows])
        return buf.getvalue().rstrip("\n")


def compute_stats(index: PfpIndex, blob: bytes | None = None) -> StatsReport:
    blob = dumps(index) if blob is None else blob
    flat = np.frombuffer(b"".join(index.phrases), dtype=np.uint8)
    sigma = int(np.count_nonzero(np.bincount(flat, minlength=256)))
    r = queries.count_bwt_runs(index)
    return StatsReport(
        n=index.n,
        sigma=sigma,
        m=index.m,
        dict_phrases=index.sigma,
        dict_total_len=index.dictionary.total_len,
        r=r,
        n_over_r=index.n / r if r else 0.0,
        component_sizes=component_sizes(blob),
    )


# ---------------------------------------------------------------------------
# helpers


def _read_text(args: argparse.Namespace, w: int):
    raw = Path(args.input).read_bytes()
    if args.fasta:
        raw = read_fasta(raw)
    return prepare_text(raw, w, remap=args.remap, sentinel_alias=args.sentinel_char)


def _trigger_config(args: argparse.Namespace, text) -> TriggerConfig:
    if args.triggers:
        trig = [text.encode(t.encode("latin-1")) for t in args.triggers.split(",") if t]
        return TriggerConfig.explicit(trig, w=text.w)
    return TriggerConfig(w=text.w, p=args.p)


def _window(args: argparse.Namespace) -> int:
    if args.w is not None:
        return args.w
    if args.triggers:
        lengths = {len(t) for t in args.triggers.split(",") if t}
        if len(lengths) != 1:
            raise UsageError("explicit triggers must share one length")
        return lengths.pop()
    return DEFAULT_W


def _display(index: PfpIndex, value: int) -> str:
    return bytes([index.symbols[value]]).decode("latin-1")


def _parse_args_list(tokens: list[str]) -> list[int]:
    out: list[int] = []
    for tok in tokens:
        if ".." in tok:
            a, b = tok.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def _query_tuples(kind: str, args: list[str], batch: str | None) -> list[tuple[int, ...]]:
    try:
        if batch:
            lines = Path(batch).read_text().split("\n")
            tuples = [tuple(int(x) for x in line.split()) for line in lines if line.strip()]
        elif kind in PAIR_KINDS:
            if len(args) % 2:
                raise UsageError(f"{kind} takes pairs of arguments")
            vals = [int(x) for x in args]
            tuples = list(zip(vals[::2], vals[1::2]))
        else:
            tuples = [(v,) for v in _parse_args_list(args)]
    except ValueError as exc:
        raise UsageError(f"bad query argument: {exc}") from exc
    need = 2 if kind in PAIR_KINDS else 1
    if not tuples:
        raise UsageError("no query arguments given")
    for t in tuples:
        if len(t) != need:
            raise UsageError(f"{kind} takes {need} argument(s) per query, got {len(t)}")
    return tuples


def run_query(index: PfpIndex, kind: str, args: tuple[int, ...]) -> str:
    if kind == "sa":
        return str(queries.sa(index, *args))
    if kind == "isa":
        return str(queries.isa(index, *args))
    if kind == "lcp":
        return str(queries.lcp(index, *args))
    if kind == "lce":
        return str(queries.lce(index, *args))
    if kind == "rmq":
        return str(queries.rmq_lcp(index, *args))
    if kind == "bwt":
        return _display(index, queries.bwt(index, *args))
    if kind == "access":
        return _display(index, queries.access(index, *args))
    raise UsageError(f"unknown query kind {kind!r}")


def bench_queries(kind: str, count: int, n: int, seed: int) -> list[tuple[int, ...]]:
    """Seeded uniform random query arguments for ``kind``."""
    rng = np.random.default_rng(seed)
    if kind in ("sa", "isa", "bwt", "access"):
        return [(int(x),) for x in rng.integers(0, n, count)]
    if kind == "lcp":
        return [(int(x),) for x in rng.integers(1, max(n, 2), count)]
    if kind == "lce":
        pairs = rng.integers(0, n, (count, 2))
        return [(int(a), int(b)) for a, b in pairs]
    if kind == "rmq":
        pairs = np.sort(rng.integers(1, max(n, 2), (count, 2)), axis=1)
        return [(int(a), int(b)) for a, b in pairs]
    raise UsageError(f"unknown query kind {kind!r}")


def time_queries(index: PfpIndex, kind: str, qs: list[tuple[int, ...]], threads: int = 1) -> np.ndarray:
    """Per-query latencies in seconds."""
    fn = {
        "sa": queries.sa,
        "isa": queries.isa,
        "lcp": queries.lcp,
        "lce": queries.lce,
        "rmq": queries.rmq_lcp,
        "bwt": queries.bwt,
        "access": queries.access,
    }[kind]

    def worker(chunk: list[tuple[int, ...]]) -> list[int]:
        out = []
        clock = time.perf_counter_ns
        for q in chunk:
            t0 = clock()
            fn(index, *q)
            out.append(clock() - t0)
        return out

    if threads <= 1:
        lat = worker(qs)
    else:
        parts = [qs[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            lat = [x for part in pool.map(worker, parts) for x in part]
    return np.asarray(lat, dtype=np.float64) / 1e9


# ---------------------------------------------------------------------------
# commands


def cmd_build(args: argparse.Namespace) -> int:
    w = _window(args)
    t0 = time.perf_counter()
    symbols = None
    if args.pfp:
        d, p = read_pfp(args.input, w)
    else:
        text = _read_text(args, w)
        cfg = _trigger_config(args, text)
        d, p = parse_text(text, cfg)
        symbols = text.symbols
    t_parse = time.perf_counter() - t0
    if args.export_pfp:
        write_pfp(args.export_pfp, d, p)
    tracemalloc.start()
    t1 = time.perf_counter()
    index = build_index(d, p, symbols=symbols)
    t_build = time.perf_counter() - t1
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    blob = dumps(index)
    Path(args.output).write_bytes(blob)
    print(f"n={index.n} w={index.w} m={index.m} phrases={index.sigma} dict_len={d.total_len}")
    print(f"parse time   {t_parse:.2f} s")
    print(f"build time   {t_build:.2f} s")
    print(f"peak memory  {peak / 2**20:.1f} MiB (builder, allocator statistics)")
    print(f"index size   {len(blob)} bytes -> {args.output}")
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    if args.kind not in QUERY_KINDS:
        raise UsageError(f"kind must be one of {', '.join(QUERY_KINDS)}")
    tuples = _query_tuples(args.kind, args.args, args.batch)
    index = load_index(args.index)
    out = sys.stdout
    for t in tuples:
        out.write(run_query(index, args.kind, t) + "\n")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    blob = Path(args.index).read_bytes()
    report = compute_stats(loads(blob), blob)
    print(report.as_csv() if args.csv else report.as_text())
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.kind not in QUERY_KINDS:
        raise UsageError(f"kind must be one of {', '.join(QUERY_KINDS)}")
    if args.count < 1:
        raise UsageError("count must be positive")
    index = load_index(args.index)
    qs = bench_queries(args.kind, args.count, index.n, args.seed)
    lat = time_queries(index, args.kind, qs, args.threads) * 1e6
    mean, median, p99 = float(lat.mean()), float(np.median(lat)), float(np.percentile(lat, 99))
    if args.csv:
        print("kind,count,seed,threads,mean_us,median_us,p99_us")
        print(f"{args.kind},{args.count},{args.seed},{args.threads},{mean:.2f},{median:.2f},{p99:.2f}")
    else:
        print(f"{args.kind}: {args.count} queries, seed {args.seed}, {args.threads} thread(s)")
        print(f"mean {mean:.2f} us  median {median:.2f} us  p99 {p99:.2f} us")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    text = _read_text(args, _window(args))
    o = oracle_build(text.data)
    shown = text.display(text.data)
    print("i\tsa\tbwt\tlcp\tsuffix")
    for i in range(o.n):
        p = int(o.sa[i])
        suffix = shown[p : p + 40].decode("latin-1")
        bwt_ch = shown[(p - 1) % o.n : (p - 1) % o.n + 1].decode("latin-1")
        print(f"{i}\t{p}\t{bwt_ch}\t{int(o.lcp[i])}\t{suffix}")
    return EXIT_OK


def _add_text_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("-w", type=int, default=None, help=f"window length (default {DEFAULT_W})")
    sp.add_argument("--remap", action="store_true", help="shift reserved bytes 0x00-0x02 out of the way")
    sp.add_argument("--fasta", action="store_true", help="read INPUT as FASTA")
    sp.add_argument("--sentinel-char", default=None, type=lambda s: s.encode("latin-1"),
                    help="input byte that denotes the sentinel (e.g. '#')")
    sp.add_argument("--triggers", default=None, help="comma-separated explicit trigger strings")


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pfpds", description="Prefix-free parsing text index.")
    sub = ap.add_subparsers(dest="command", metavar="{build,query,stats,bench}", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("build", help="parse a text and write an index file")
    sp.add_argument("input")
    sp.add_argument("output")
    _add_text_flags(sp)
    sp.add_argument("-p", type=int, default=DEFAULT_P, help=f"hash modulus (default {DEFAULT_P})")
    sp.add_argument("--seed", type=int, default=0, help="accepted for symmetry; parsing is deterministic")
    sp.add_argument("--pfp", action="store_true", help="INPUT is a prefix of .dict/.parse files")
    sp.add_argument("--export-pfp", metavar="PREFIX", default=None, help="also write .dict/.parse files")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("query", help="answer queries against an index")
    sp.add_argument("index")
    sp.add_argument("kind", help="|".join(QUERY_KINDS))
    sp.add_argument("args", nargs="*", help="integers or inclusive ranges a..b")
    sp.add_argument("--batch", default=None, help="file with one query per line")
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("stats", help="report index statistics")
    sp.add_argument("index")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("bench", help="time random queries")
    sp.add_argument("index")
    sp.add_argument("kind", help="|".join(QUERY_KINDS))
    sp.add_argument("count", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("oracle")  # debugging aid, deliberately not listed
    sp.add_argument("input")
    _add_text_flags(sp)
    sp.set_defaults(func=cmd_oracle)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pfpds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PfpError, OSError) as exc:
        print(f"pfpds: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
