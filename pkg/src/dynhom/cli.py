"""Command line entry point: ``dynhom --script FILE`` and friends."""

from __future__ import annotations

import argparse
import sys

from .circuits import Circuit, eval_circuit, reduction_script
from .errors import DynHomError
from .hypergraph import Schema
from .oracles import ScriptLimits, random_change_script
from .script import run_script

DEFAULT_RANDOM_SCHEMA = "E/2 F/1 G/3"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dynhom",
        description="Maintain an acyclic query's join forest and homomorphism "
                    "existence under a script of changes.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--script", metavar="PATH",
                     help="command script to run (default: stdin)")
    src.add_argument("--random", type=int, metavar="STEPS",
                     help="generate a random script with STEPS commands")
    src.add_argument("--circuit", metavar="PATH",
                     help="circuit file; runs the proof-tree reduction")
    p.add_argument("--seed", type=int, default=0, help="seed for --random")
    p.add_argument("--schema", default=DEFAULT_RANDOM_SCHEMA,
                   help="schema for --random (default: %(default)s)")
    p.add_argument("--input", metavar="BITS",
                   help="input bits for --circuit, e.g. 0110")
    p.add_argument("--check-every", type=int, default=0, metavar="K",
                   help="run `check` after every K commands")
    p.add_argument("--quiet", action="store_true",
                   help="print only errors and failed checks")
    p.add_argument("--emit", action="store_true",
                   help="print the generated script instead of running it")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    trailer = []
    try:
        if args.random is not None:
            lines = random_change_script(Schema.parse(args.schema), args.random,
                                         ScriptLimits(), args.seed)
        elif args.circuit:
            with open(args.circuit) as fh:
                C = Circuit.from_text(fh.read())
            bits = args.input if args.input is not None else "0" * C.n_inputs
            if set(bits) - {"0", "1"}:
                print("error input: --input takes a string of 0/1", file=sys.stderr)
                return 2
            x = tuple(int(b) for b in bits)
            lines = reduction_script(C, x)
            trailer = [f"eval {'yes' if eval_circuit(C, x) else 'no'}"]
        elif args.script:
            with open(args.script) as fh:
                lines = fh.read().splitlines()
        else:
            lines = sys.stdin.read().splitlines()
    except (OSError, DynHomError) as exc:
        print(f"error {getattr(exc, 'kind', 'io')}: {exc}", file=sys.stderr)
        return 2
    if args.emit:
        print("\n".join(lines))
        return 0
    status = run_script(lines, sys.stdout, check_every=args.check_every,
                        quiet=args.quiet)
    if not args.quiet:
        for t in trailer:
            print(t)
    return status


if __name__ == "__main__":
    sys.exit(main())
