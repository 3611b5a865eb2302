"""``randtaylor run --config PATH --out DIR [--threads K] [--precision-bits P]``.

Exit status: 0 when every row passes, 1 when any row fails, 2 for a bad config.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .config import ConfigError, load_config
from .presets import PRESETS, RunContext
from .report import Report

log = logging.getLogger("randtaylor")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def run(config_path, out_dir, threads: int = 1, precision_bits: int | None = None) -> Report:
    """Run one experiment and write its report; raises :class:`ConfigError` for bad input."""
    cfg = load_config(config_path)
    if threads < 1:
        raise ConfigError("threads", "must be at least 1")
    if precision_bits is not None and precision_bits < 2:
        raise ConfigError("precision-bits", "must be at least 2")
    rep = Report(cfg.tag, out_dir)
    t0 = time.perf_counter()
    with ThreadPoolExecutor(threads) if threads > 1 else _nullpool() as pool:
        ctx = RunContext(threads, precision_bits, pool)
        PRESETS[cfg.tag](cfg, rep, ctx)
    rep.close(time.perf_counter() - t0, str(config_path), threads)
    return rep


class _nullpool:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="randtaylor", description="Zero-distribution and exponential-sum experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("--config", required=True, help="experiment config (INI)")
    r.add_argument("--out", required=True, help="output directory; results go to OUT/<tag>/")
    r.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    r.add_argument("--precision-bits", type=int, default=None, help="starting precision for multiprecision steps")
    r.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        rep = run(args.config, args.out, args.threads, args.precision_bits)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = [r for r in rep.rows if not r.passed]
    print(f"{rep.tag}: {len(rep.rows) - len(failed)}/{len(rep.rows)} rows pass -> {rep.dir}")
    for r in failed:
        print(f"  FAIL {r.params}: {r.rule}" + (f" ({r.reason})" if r.reason else ""), file=sys.stderr)
    return EXIT_PASS if rep.all_pass else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
