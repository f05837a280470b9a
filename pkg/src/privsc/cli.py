"""Command-line entry point: ``privsc <subcommand> --scenario FILE ...``.

Every stage can be run on its own:

``fuse``     write the fused graph
``encode``   write sent token streams and frames
``decode``   decode frames with the receiver's knowledge
``run``      full trials, transcripts and CSVs
``attack``   like ``run`` but the CSVs hold attacker rows only
``report``   recompute ``summary.csv`` from ``leakage.csv``
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .codec import BitFrame
from .exceptions import PrivscError
from .harness import (
    LEAKAGE_COLUMNS,
    SUMMARY_COLUMNS,
    Scenario,
    load_scenario,
    make_decoder,
    make_encoder,
    read_csv,
    run_batch,
    session_knowledge,
    summarize,
    write_csv,
)
from .kgio import write_graph

log = logging.getLogger("privsc")


def _sweep(text: str) -> list[float]:
    key, sep, values = text.partition("=")
    if key.strip() != "channel.p" or not sep:
        raise argparse.ArgumentTypeError("expected channel.p=<comma list>")
    try:
        ps = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not ps or any(not 0.0 <= p <= 1.0 for p in ps):
        raise argparse.ArgumentTypeError("channel.p values must lie in [0, 1]")
    return ps


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _scenario(args) -> Scenario:
    cfg = load_scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return Scenario(cfg)


def _indices(scn: Scenario, index: int | None) -> range | list[int]:
    if index is None:
        return range(len(scn.messages))
    if not 0 <= index < len(scn.messages):
        raise PrivscError(f"message index {index} outside corpus of {len(scn.messages)}")
    return [index]


def cmd_fuse(args) -> int:
    scn = _scenario(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(scn.fused, out / "fused.entities.tsv", out / "fused.triples.tsv")
    print(f"fused graph: {scn.fused.num_entities} entities, {scn.fused.num_triples} triples -> {out}")
    return 0


def cmd_encode(args) -> int:
    scn = _scenario(args)
    out = Path(args.out)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    (out / "tokens").mkdir(parents=True, exist_ok=True)
    for i in _indices(scn, args.index):
        mid = scn.message_id(i)
        enc = make_encoder(scn, session_knowledge(scn, i))
        pre = enc.tokenize([scn.messages[i]], [mid])[0]
        post = enc.align([pre])[0]
        frame = enc.encode([post])[0]
        (out / "tokens" / f"{mid}.txt").write_text(f"pre: {pre.to_text()}\npost: {post.to_text()}\n")
        (out / "frames" / f"{mid}.bits").write_text(frame.to_string() + "\n")
    print(f"encoded {len(_indices(scn, args.index))} message(s) -> {out}")
    return 0


def cmd_decode(args) -> int:
    scn = _scenario(args)
    frames = Path(args.frames) if args.frames else Path(args.out) / "frames"
    out = Path(args.out) / "decoded"
    out.mkdir(parents=True, exist_ok=True)
    n = 0
    for i in _indices(scn, args.index):
        mid = scn.message_id(i)
        path = frames / f"{mid}.bits"
        if not path.is_file():
            continue
        private = session_knowledge(scn, i)
        dec = make_decoder(scn, private)
        msg = dec.predict([BitFrame.from_string(path.read_text(), scn.cfg.width)], [mid])[0]
        lines = [
            f"received: {msg.received.to_text()}",
            f"repaired: {msg.repaired.to_text()}",
            f"public: {' | '.join(sorted(msg.public_texts)) or '-'}",
            f"sensitive: {' | '.join(sorted(msg.sensitive_texts)) or '-'}",
            f"undecoded: {msg.undecoded_fraction!r}",
        ]
        for f in msg.facts:
            value = f" = {f.value}" if f.value is not None else ""
            lines.append(f"fact: {f.subject} {f.relation} {f.object}{value}")
        (out / f"{mid}.txt").write_text("\n".join(lines) + "\n")
        n += 1
    print(f"decoded {n} frame(s) -> {out}")
    return 0


def cmd_run(args, attackers_only: bool = False) -> int:
    scn = _scenario(args)
    code = run_batch(scn, args.out, args.sweep, attackers_only=attackers_only)
    print(f"{'attack' if attackers_only else 'run'}: {len(scn.messages)} message(s) -> {args.out} (exit {code})")
    return code


def cmd_report(args) -> int:
    src = Path(args.leakage) if args.leakage else Path(args.out) / "leakage.csv"
    rows = read_csv(src)
    missing = set(LEAKAGE_COLUMNS) - set(rows[0]) if rows else set()
    if missing:
        raise PrivscError(f"{src} lacks columns {sorted(missing)}")
    summary = summarize(rows)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_csv(Path(args.out) / "summary.csv", SUMMARY_COLUMNS, summary)
    print("\t".join(SUMMARY_COLUMNS))
    for row in summary:
        print("\t".join(row[c] for c in SUMMARY_COLUMNS))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privsc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, func, help_text, seed=True, out_default="out"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True, help="scenario file")
        if seed:
            p.add_argument("--seed", type=_seed, help="override run.seed")
        p.add_argument("--out", default=out_default, help="output directory")
        p.set_defaults(func=func)
        return p

    stage("fuse", cmd_fuse, "fuse the two personal graphs", seed=False)
    for name, func, text in (("encode", cmd_encode, "encode corpus messages"), ("decode", cmd_decode, "decode frames")):
        p = stage(name, func, text)
        p.add_argument("--index", type=int, help="one corpus message instead of all")
    sub.choices["decode"].add_argument("--frames", help="directory of <msg_id>.bits files (default OUT/frames)")
    for name, only in (("run", False), ("attack", True)):
        p = stage(name, lambda a, only=only: cmd_run(a, only), f"{name} trials over the corpus")
        p.add_argument("--sweep", type=_sweep, metavar="channel.p=LIST", help="comma list of channel probabilities")

    p = sub.add_parser("report", help="summarize a leakage.csv")
    p.add_argument("--out", default="out", help="directory holding leakage.csv; summary.csv is written here")
    p.add_argument("--leakage", help="explicit leakage.csv path")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (PrivscError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
