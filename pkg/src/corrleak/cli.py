"""Command-line front end: ``rate``, ``optimize``, ``sweep`` and ``budget``.

Exit codes: 0 on success (a zero-key result is still a success), 2 on a
configuration or validation error, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .bounds import LogEpsilon
from .config import ConfigError, RunConfig, dump_config, load_config
from .framework import BudgetInfeasible, chain_penalty_bits, epsilon_hat
from .optimizer import optimize_point
from .security import KeyRateResult, evaluate_point

EXIT_CONFIG = 2
EXIT_IO = 3

CSV_COLUMNS = (
    "attenuation_db", "xi", "n_total", "p_send", "mu_max", "p_pe",
    "mu_equ_a", "mu_equ_b", "e_bit", "n_z_lower", "n_ph_upper", "penalty_bits",
    "key_length_bits", "key_rate_per_pulse", "status",
)


def fmt_num(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def csv_row(att_db, p_send, mu_max, p_pe, res: KeyRateResult) -> list[str]:
    values = (
        att_db, res.xi, res.n_total, p_send, mu_max, p_pe,
        res.mu_equ_a, res.mu_equ_b, res.e_bit, res.n_z_lower, res.n_ph_upper,
        res.penalty_bits, res.l_max, res.rate, res.status,
    )
    return [fmt_num(v) for v in values]


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def _write(path: str, text: str):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc.strerror}") from None


def _report(res: KeyRateResult, params: dict) -> str:
    lines = [f"{k}: {fmt_num(v)}" for k, v in params.items()]
    fields = (
        "status", "l_max", "rate", "mu_equ_a", "mu_equ_b", "c0", "c1", "c2bar",
        "p_o_up", "p_b_up", "p_ph", "n_ph_upper", "n_z_lower", "e_bit",
        "penalty_bits", "eps1_log2_inv",
    )
    lines += [f"{k}: {fmt_num(getattr(res, k))}" for k in fields]
    return "\n".join(lines) + "\n"


def _emit_single(cfg: RunConfig, out: str | None, att, p_send, mu_max, p_pe, res):
    params = {"attenuation_db": att, "xi": res.xi, "n_total": res.n_total,
              "p_send": p_send, "mu_max": mu_max, "p_pe": p_pe}
    sys.stdout.write(_report(res, params))
    table = render_csv([csv_row(att, p_send, mu_max, p_pe, res)])
    path = out or cfg.output_path
    if path:
        _write(path, table)
    else:
        sys.stdout.write("\n" + table)


def cmd_rate(cfg: RunConfig, args) -> int:
    ch = cfg.channel()
    res = evaluate_point(ch, cfg.n_total, cfg.xi, cfg.p_send, cfg.mu_max, cfg.p_pe,
                         budget=cfg.budget(), ec_efficiency=cfg.ec_efficiency)
    _emit_single(cfg, args.out, ch.att_a_db, cfg.p_send, cfg.mu_max, cfg.p_pe, res)
    if args.mc_samples:
        from .montecarlo import simulate_counts

        seen = simulate_counts(int(args.mc_samples), cfg.p_pe, cfg.p_send, cfg.p_send,
                               cfg.mu_max, cfg.mu_max, ch, seed=args.seed)
        scale = args.mc_samples / cfg.n_total
        sys.stdout.write(f"\nmonte carlo check ({args.mc_samples} rounds, seed {args.seed}):\n")
        for k, v in seen.items():
            sys.stdout.write(f"{k}: observed {v} expected {fmt_num(getattr(res.counts, k) * scale)}\n")
    return 0


def cmd_optimize(cfg: RunConfig, args) -> int:
    ch = cfg.channel()
    best = optimize_point(ch, cfg.n_total, cfg.xi, cfg.budget(), cfg.ec_efficiency, cfg.search_space())
    _emit_single(cfg, args.out, ch.att_a_db, best.p_send, best.mu_max, best.p_pe, best.result)
    return 0


def _sweep_task(job):
    cfg, xi, att = job
    best = optimize_point(cfg.channel(att), cfg.n_total, xi, cfg.budget(),
                          cfg.ec_efficiency, cfg.search_space())
    return csv_row(att, best.p_send, best.mu_max, best.p_pe, best.result)


def sweep_rows(cfg: RunConfig, threads: int = 1) -> list[list[str]]:
    jobs = [(cfg, xi, att) for xi in sorted(set(cfg.xi_list)) for att in cfg.attenuations()]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_sweep_task, jobs))
    return [_sweep_task(j) for j in jobs]


def cmd_sweep(cfg: RunConfig, args) -> int:
    text = render_csv(sweep_rows(cfg, args.threads))
    path = args.out or cfg.output_path
    if path:
        _write(path, text)
    else:
        sys.stdout.write(text)
    return 0


def budget_ledger(cfg: RunConfig) -> dict:
    b = cfg.budget()
    chain = b.chain(cfg.xi)
    eps1 = epsilon_hat(chain)
    ledger = {"xi": cfg.xi, "eps_tot": b.composed_total()}
    for name in ("eps", "eps_bar", "eps_cor", "eps0", "eps2", "eps3"):
        ledger[f"log2_inv_{name}"] = getattr(b, name).log2_inv
    ledger["log2_inv_eps1"] = eps1.log2_inv
    ledger["penalty_bits"] = chain_penalty_bits(chain)
    return ledger


def cmd_budget(cfg: RunConfig, args) -> int:
    try:
        ledger = budget_ledger(cfg)
    except BudgetInfeasible as exc:
        raise ConfigError(str(exc)) from None
    for k, v in ledger.items():
        sys.stdout.write(f"{k}: {fmt_num(v)}\n")
    return 0


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("CORRLEAK_THREADS", "1")
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"--threads: not an integer: {value!r}") from None
    if n < 1:
        raise ConfigError("--threads: must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--out", help="CSV output path")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--threads", default=None, help="worker processes (env CORRLEAK_THREADS)")
    common.add_argument("--seed", type=int, default=0, help="seed for the Monte Carlo check")
    common.add_argument("--dump-config", action="store_true",
                        help="print the effective configuration and exit")

    p = argparse.ArgumentParser(prog="corrleak", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    rate = sub.add_parser("rate", parents=[common], help="key length at fixed parameters")
    rate.add_argument("--mc-samples", type=int, default=0,
                      help="also simulate this many rounds and compare counts")
    sub.add_parser("optimize", parents=[common], help="optimise parameters at one channel point")
    sub.add_parser("sweep", parents=[common], help="optimised attenuation/xi sweep to CSV")
    sub.add_parser("budget", parents=[common], help="print the epsilon ledger")
    return p


COMMANDS = {"rate": cmd_rate, "optimize": cmd_optimize, "sweep": cmd_sweep, "budget": cmd_budget}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = _threads(args.threads)
        cfg = load_config(args.config, args.set)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"corrleak: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"corrleak: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
