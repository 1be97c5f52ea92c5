"""Command-line front end.

Subcommands: ``tensor`` (print all correlation entries of a named state),
``schmidt`` (run the Schmidt-basis protocol), ``tree`` (print a decision
branch), ``detect`` (adaptive run against a simulated state), ``lab run``
(Monte-Carlo experiment from a config file) and ``serve`` (HTTP API).

Exit codes: 0 success, 2 invalid input, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .engine import DecisionPolicy, Status, run_auto
from .lab import ExperimentConfig, run_experiment
from .pauli import PauliStringError
from .schmidt import schmidt_protocol
from .states import StateError, make_state
from .strings import build_branch
from .tensor import full_tensor


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entdetect", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tensor", help="print the correlation tensor of a state")
    p.add_argument("state", help="state spec, e.g. werner:0.8 or product:00")
    p.add_argument("--full", action="store_true", help="include identity-slot entries")

    p = sub.add_parser("schmidt", help="run the Schmidt-basis detection protocol")
    p.add_argument("state")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("tree", help="print one decision-tree branch as JSON")
    p.add_argument("n_qubits", type=int)
    p.add_argument("--seed", default=None, help="seed word, e.g. ZZZZ")

    p = sub.add_parser("detect", help="adaptive detection run on a simulated state")
    p.add_argument("state")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("lab", help="Monte-Carlo experiments")
    lab_sub = p.add_subparsers(dest="lab_command", required=True)
    p = lab_sub.add_parser("run", help="run an experiment config (JSON or TOML)")
    p.add_argument("config")
    p.add_argument("--out", default=".", help="output directory for CSV + summary")

    p = sub.add_parser("serve", help="start the interactive session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="journal directory (default: in-memory only)")

    return parser


def _cmd_tensor(args) -> int:
    tensor = full_tensor(make_state(args.state))
    entries = tensor.entries if args.full else tensor.full_weight()
    shown = {k: round(v, 12) for k, v in entries.items() if abs(v) > 1e-12 or args.full}
    print(json.dumps({"n": tensor.n_qubits, "entries": shown}, indent=2))
    return 0


def _cmd_schmidt(args) -> int:
    state = make_state(args.state)
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    transcript = schmidt_protocol(state, epsilon=args.epsilon, shots=args.shots, rng=rng)
    print(transcript.to_json_lines())
    return 0


def _cmd_tree(args) -> int:
    branch = build_branch(args.n_qubits, args.seed)
    print(branch.to_json())
    return 0


def _cmd_detect(args) -> int:
    state = make_state(args.state)
    policy = DecisionPolicy(state.n_qubits, threshold=args.threshold)
    rng = np.random.default_rng(args.seed)
    session = run_auto(state, policy, shots=args.shots, rng=rng)
    for line in session.to_json_lines().splitlines():
        print(line)
    label = "ENTANGLED" if session.status is Status.ENTANGLED else "UNDETERMINED"
    print(f"{label} after {len(session.log)} settings (sum={session.running_sum:.3f})")
    return 0


def _cmd_lab(args) -> int:
    config = ExperimentConfig.load(args.config)
    csv_text, summary = run_experiment(config)
    os.makedirs(args.out, exist_ok=True)
    stem = f"{config.ensemble}{config.n_qubits}_{config.strategy}_s{config.seed}"
    csv_path = os.path.join(args.out, stem + ".csv")
    summary_path = os.path.join(args.out, stem + ".json")
    with open(csv_path, "w") as fh:
        fh.write(csv_text)
    with open(summary_path, "w") as fh:
        fh.write(summary)
    print(csv_path)
    print(summary_path)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_HANDLERS = {
    "tensor": _cmd_tensor,
    "schmidt": _cmd_schmidt,
    "tree": _cmd_tree,
    "detect": _cmd_detect,
    "lab": _cmd_lab,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (StateError, PauliStringError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
