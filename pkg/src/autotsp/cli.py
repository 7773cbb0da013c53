"""Command-line entry point: ``autotsp analyze | simulate | corrupt``.

Exit codes: 0 ok, 1 error, 2 ok but a fallback path was used.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .noise import NoiseSpec, corrupt_labels
from .regions import COMPACTED, DENSE
from .report import analyze, dumps, file_digest
from .sim import SimConfig, simulate_run
from .stoppoint import ACCUMULATE, ARGMAX_SEGMENT, LAST_NONZERO, OVERWRITE, Hyperparams
from .traininglog import (SampleLedger, load_ledger, load_run, load_trace, write_ledger,
                          write_run, write_trace)

log = logging.getLogger("autotsp")

EXIT_OK, EXIT_ERROR, EXIT_FALLBACK = 0, 1, 2
_STOP_RULES = {"argmax": ARGMAX_SEGMENT, "last-nonzero": LAST_NONZERO}


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_tuple(n):
    def parse(text):
        try:
            vals = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
        return vals
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="autotsp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="find the training stop point of a logged run")
    a.add_argument("epochs", help="epochs CSV or JSON")
    a.add_argument("--format", choices=["csv", "json"])
    a.add_argument("--ledger", help="ledger CSV (sample_id,observed_label[,true_label])")
    a.add_argument("--trace", help="trace CSV (epoch,sample_id,correct|predicted_label)")
    a.add_argument("--tau", type=float, help="known noise rate, enables the NHA baseline")
    a.add_argument("--beta", type=_int_list, default=[5, 6, 7])
    a.add_argument("--theta1", type=float, default=0.5)
    a.add_argument("--theta2", type=float, default=0.5)
    a.add_argument("--stop-rule", choices=sorted(_STOP_RULES), default="argmax")
    a.add_argument("--init-mode", choices=[ACCUMULATE, OVERWRITE], default=ACCUMULATE)
    a.add_argument("--interval-mode", choices=[COMPACTED, DENSE], default=COMPACTED)
    a.add_argument("--esm-window", type=int, default=5)
    a.add_argument("--rescale", action="store_true", help="accept fractional accuracies in [0, 1]")
    a.add_argument("--out", help="report path (default: stdout)")
    a.add_argument("--plot-dir", help="directory for plot CSVs")

    s = sub.add_parser("simulate", help="generate synthetic noisy-label training logs")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--batch", type=int, default=None, help="write N scenarios with seeds seed..seed+N-1")
    s.add_argument("--D", type=int, default=1000)
    s.add_argument("--E", type=int, default=200)
    s.add_argument("--tau", type=float, default=0.5)
    s.add_argument("--kind", choices=["symmetric", "asymmetric"], default="symmetric")
    s.add_argument("--classes", type=int, default=10)
    s.add_argument("--clean-onset", type=_float_tuple(2), default=(25.0, 10.0))
    s.add_argument("--noisy-onset", type=_float_tuple(2), default=(110.0, 25.0))
    s.add_argument("--retention", type=float, default=0.98)
    s.add_argument("--proxy", type=_float_tuple(3), default=(90.0, 60.0, 8.0), help="a,b,base")

    c = sub.add_parser("corrupt", help="inject label noise into a ledger of true labels")
    c.add_argument("input", help="ledger CSV; true_label (or observed_label) is taken as ground truth")
    c.add_argument("output")
    c.add_argument("--kind", choices=["symmetric", "asymmetric"], default="symmetric")
    c.add_argument("--tau", type=float, required=True)
    c.add_argument("--classes", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    return p


def cmd_analyze(args) -> int:
    run = load_run(args.epochs, args.format, rescale=args.rescale)
    digests = {"epochs": file_digest(args.epochs)}
    ledger = trace = None
    if args.ledger:
        ledger = load_ledger(args.ledger)
        digests["ledger"] = file_digest(args.ledger)
    if args.trace:
        trace = load_trace(args.trace, ledger)
        digests["trace"] = file_digest(args.trace)
    hp = Hyperparams(beta_set=tuple(args.beta), theta1=args.theta1, theta2=args.theta2,
                     stop_rule=_STOP_RULES[args.stop_rule], init_mode=args.init_mode,
                     interval_mode=args.interval_mode)
    result = analyze(run, hp, ledger, trace, args.tau, args.esm_window, digests)
    text = result.report_json()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.plot_dir:
        result.write_plots(args.plot_dir)
    return EXIT_FALLBACK if result.fallback_used else EXIT_OK


def _write_scenario(out_dir: Path, cfg: SimConfig, seed: int) -> dict:
    sim = simulate_run(cfg, seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_run(sim.run, out_dir / "epochs.csv")
    write_ledger(sim.ledger, out_dir / "ledger.csv")
    write_trace(sim.trace, out_dir / "trace.csv")
    truth = dict(sim.truth, config=cfg.to_dict())
    (out_dir / "truth.json").write_text(json.dumps(truth, sort_keys=True, indent=2) + "\n")
    return truth


def cmd_simulate(args) -> int:
    cfg = SimConfig(D=args.D, noise=NoiseSpec(args.kind, args.tau, args.classes), E=args.E,
                    clean_onset=args.clean_onset, noisy_onset=args.noisy_onset,
                    retention=args.retention, proxy=args.proxy)
    out = Path(args.out_dir)
    if args.batch is None:
        t = _write_scenario(out, cfg, args.seed)
        print(f"seed={t['seed']} e_mem_sim={t['e_mem_sim']} e_sm_sim={t['e_sm_sim']} "
              f"mota_sim={t['mota_sim']} -> {out}")
        return EXIT_OK
    if args.batch < 1:
        raise ValueError("--batch must be >= 1")
    for k in range(args.batch):
        t = _write_scenario(out / f"scenario_{k:03d}", cfg, args.seed + k)
        print(f"scenario_{k:03d} seed={t['seed']} e_mem_sim={t['e_mem_sim']} "
              f"e_sm_sim={t['e_sm_sim']} mota_sim={t['mota_sim']}")
    return EXIT_OK


def cmd_corrupt(args) -> int:
    src = load_ledger(args.input, args.classes)
    truth = src.true if src.true is not None else src.observed
    spec = NoiseSpec(args.kind, args.tau, args.classes or src.class_count)
    _, ledger = corrupt_labels(truth, spec, args.seed, sample_ids=src.sample_ids)
    write_ledger(ledger, args.output)
    flipped = int((ledger.observed != ledger.true).sum())
    print(f"flipped {flipped}/{ledger.size} labels ({flipped / ledger.size:.4f})")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "corrupt": cmd_corrupt}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
