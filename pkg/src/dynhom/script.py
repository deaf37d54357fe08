"""Line-oriented command protocol driving the forest and the engine.

One session per script.  Every command prints one line (``snapshot`` prints
a block).  Query changes that would make the query cyclic are denied and
leave the session untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO

from . import oracles
from .data import DataIndex
from .engine import HomEngine
from .errors import DynHomError, ParseError, StateError
from .forest import DiffEvent, MaxSpanningForest, apply_change
from .hypergraph import Hyperedge, Hypergraph, Schema

_PAREN = re.compile(r"\(([^()]*)\)")


def _naturals(tokens, what, lineno) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in tokens)
    except ValueError:
        raise ParseError(f"{what} must be decimal naturals", lineno) from None
    if any(v < 0 for v in vals):
        raise ParseError(f"{what} must be decimal naturals", lineno)
    return vals


@dataclass
class Session:
    schema: Optional[Schema] = None
    query: Optional[Hypergraph] = None
    forest: Optional[MaxSpanningForest] = None
    data: Optional[DataIndex] = None
    engine: Optional[HomEngine] = None
    applied: int = 0
    denied: int = 0
    max_diff: int = 0
    errors: int = 0
    diffs: list = field(default_factory=list)
    keep_diffs: bool = False

    # -- setup -------------------------------------------------------------

    def declare(self, schema: Schema) -> None:
        self.schema = schema
        self.query = Hypergraph(schema)
        self.forest = MaxSpanningForest(self.query)
        self.data = DataIndex(schema)
        self.engine = HomEngine(self.query, self.forest, self.data)

    def _need_schema(self, lineno):
        if self.schema is None:
            raise ParseError("a schema declaration must come first", lineno)

    # -- command execution ---------------------------------------------------

    def execute(self, line: str, lineno: Optional[int] = None) -> list[str]:
        """Run one command line and return its output lines."""
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            return []
        cmd, args = tokens[0], tokens[1:]
        if cmd == "schema":
            if self.schema is not None:
                raise ParseError("schema declared twice", lineno)
            try:
                self.declare(Schema.parse(" ".join(args)))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            return ["ok"]
        self._need_schema(lineno)
        handler = getattr(self, f"_cmd_{cmd}", None)
        if handler is None:
            raise ParseError(f"unknown command {cmd!r}", lineno)
        try:
            return handler(args, line, lineno)
        except ParseError:
            raise
        except DynHomError as exc:
            self.errors += 1
            return [f"error {exc.kind}"]

    def _edge(self, args, lineno) -> Hyperedge:
        if not args:
            raise ParseError("missing relation", lineno)
        rel = args[0]
        if rel not in self.schema:
            raise ParseError(f"unknown relation {rel!r}", lineno)
        return Hyperedge(rel, _naturals(args[1:], "node ids", lineno))

    def _cmd_domq(self, args, line, lineno):
        (n,) = self._one_natural(args, lineno)
        if any(v >= n for v in self.query.nodes_in_use()):
            raise StateError("nodes already in use beyond the new domain")
        self.query.domain_size = n
        self.engine.refresh_domain()
        return ["ok"]

    def _cmd_domd(self, args, line, lineno):
        (n,) = self._one_natural(args, lineno)
        if any(x >= n for x in self.data.domain_elements()):
            raise StateError("elements already in use beyond the new domain")
        self.data.domain_size = n
        self.engine.refresh_domain()
        return ["ok"]

    def _one_natural(self, args, lineno):
        if len(args) != 1:
            raise ParseError("expected one natural number", lineno)
        return _naturals(args, "domain size", lineno)

    def change_query(self, op: str, e: Hyperedge) -> Optional[DiffEvent]:
        """Apply a query change unless it breaks acyclicity; None if denied."""
        if op == "ins":
            # surfaces arity/domain/duplicate errors before the trial run
            self.query._validate(e)
        if not self.forest.would_stay_acyclic(op, e):
            self.denied += 1
            return None
        diff = apply_change(self.query, self.forest, op, e)
        self.engine.apply_forest_diff(diff)
        self.applied += 1
        self.max_diff = max(self.max_diff, len(diff))
        if self.keep_diffs:
            self.diffs.append(diff)
        return diff

    def _cmd_insq(self, args, line, lineno):
        return self._q_change("ins", args, lineno)

    def _cmd_delq(self, args, line, lineno):
        return self._q_change("del", args, lineno)

    def _q_change(self, op, args, lineno):
        diff = self.change_query(op, self._edge(args, lineno))
        return ["denied" if diff is None else f"applied diff={len(diff)}"]

    def _cmd_setd(self, args, line, lineno):
        if not args:
            raise ParseError("missing relation", lineno)
        rel = args[0]
        if rel not in self.schema:
            raise ParseError(f"unknown relation {rel!r}", lineno)
        body = line.split("#", 1)[0].split(None, 2)
        rest = body[2] if len(body) > 2 else ""
        if _PAREN.sub(" ", rest).strip():
            raise ParseError("setd tuples must be parenthesised", lineno)
        tuples = [_naturals(re.split(r"[\s,]+", m.strip()) if m.strip() else [],
                            "elements", lineno)
                  for m in _PAREN.findall(rest)]
        self.engine.replace_relation_d(rel, tuples)
        return ["applied"]

    def _d_change(self, op, args, lineno):
        e = self._edge(args, lineno)
        self.engine.change_d_tuple(op, e.rel, e.nodes)
        return ["applied"]

    def _cmd_insd(self, args, line, lineno):
        return self._d_change("ins", args, lineno)

    def _cmd_deld(self, args, line, lineno):
        return self._d_change("del", args, lineno)

    def _cmd_ask(self, args, line, lineno):
        return ["yes" if self.engine.answer() else "no"]

    def _cmd_stats(self, args, line, lineno):
        return [f"wQ={self.query.weight()} wF={self.forest.total_weight} "
                f"maxdiff={self.max_diff} denied={self.denied}"]

    def _cmd_snapshot(self, args, line, lineno):
        return self.snapshot()

    def _cmd_check(self, args, line, lineno):
        problems = self.check()
        return ["check ok" if not problems
                else "check failed: " + "; ".join(problems)]

    # -- inspection -----------------------------------------------------------

    def snapshot(self) -> list[str]:
        return self.forest.snapshot_lines() + self.engine.valid_lines()

    def state_fingerprint(self) -> tuple:
        """Everything a denied change must leave untouched."""
        return (tuple(self.snapshot()), tuple(self.engine.message_lines()),
                self.engine.answer(), self.query.sorted_edges(),
                self.forest.total_weight)

    def check(self) -> list[str]:
        """Compare the maintained state with the brute-force oracles."""
        Q, F = self.query, self.forest
        problems = []
        verdict = F.acyclicity()
        if verdict.acyclic != oracles.gyo_acyclic(Q):
            problems.append("acyclicity verdict disagrees with GYO")
        if F.total_weight != oracles.kruskal_msf_weight(Q):
            problems.append("forest weight is not maximal")
        if Q.weight() != oracles.hypergraph_weight(Q):
            problems.append("hypergraph weight drifted")
        found, _ = oracles.brute_hom(Q, self.data)
        if found != self.engine.answer():
            problems.append("answer disagrees with brute force")
        adjacency = {e: set(F.neighbors(e)) for e in F.nodes()}
        if oracles.scratch_messages(adjacency, self.data) != self.engine.messages:
            problems.append("messages are not at their fixpoint")
        return problems


def iter_commands(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if line.split("#", 1)[0].strip():
            yield no, line


def run_script(lines: Iterable[str], out: TextIO, check_every: int = 0,
               quiet: bool = False, session: Optional[Session] = None) -> int:
    """Execute a script; returns the exit status.

    0 on a clean run, 1 if any command reported an error or a failed check,
    2 on a parse error (execution stops at the offending line).
    """
    s = session if session is not None else Session()
    failed = False
    count = 0
    for no, line in iter_commands(lines):
        if s.schema is None and line.split()[0] != "schema":
            print(f"error parse: line {no}: a schema declaration must come first",
                  file=out)
            return 2
        try:
            result = s.execute(line, no)
        except ParseError as exc:
            print(f"error parse: {exc}", file=out)
            return 2
        count += 1
        if check_every and count % check_every == 0:
            result = result + s._cmd_check([], "check", no)
        for r in result:
            bad = r.startswith("error") or r.startswith("check failed")
            failed |= bad
            if bad or not quiet:
                print(r, file=out)
    return 1 if failed else 0
