"""Result matrices: every (model, lemma) cell of a protocol family, checked against the reference table.

Cells are independent, so they can run in worker processes (``jobs`` or the
``AGGSIG_JOBS`` environment variable). Each worker rebuilds its protocol
instance from the cell description and results are merged in cell order, so
the output does not depend on scheduling.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .. import expected as ref
from ..errors import UsageError
from ..symbolic.theories import ModelId
from .engine import Bounds, Explorer, RestrictionMonitor
from .lemmas import check_lemma

PROTOCOLS = ("toy", "token-request", "sana")

# Token Request and SANA are searched exhaustively at one session per role.
# The target verifier's single helper is the smallest signing oracle that
# still exposes every attack.
SESSION_BOUNDS = {"toy": Bounds(), "token-request": Bounds(max_sessions_per_role=1),
                  "sana": Bounds(max_sessions_per_role=1)}
HELPERS = (("V2", 1),)
RANDOM_SCHEDULES = 10_000


@dataclass(frozen=True)
class Cell:
    protocol: str
    row: str          # lemma name
    column: str       # model short name, init mode or SANA model class
    model: ModelId
    lemma: str
    expected: str

    @property
    def label(self) -> str:
        return f"{self.protocol}/{self.row}/{self.column}/{self.model.short}"


@dataclass
class CellResult:
    cell: Cell
    verdict: str
    states: int
    random_schedules: int = 0
    monitor_queries: int = 0
    monitor_violations: tuple = ()
    trace: tuple | None = None
    replay_ok: bool = True

    @property
    def short(self) -> str:
        return ref.F if self.verdict == "Falsified" else ref.P

    @property
    def deviates(self) -> bool:
        return self.short != self.cell.expected or not self.replay_ok or bool(self.monitor_violations)

    def to_dict(self) -> dict:
        return {
            "schema": "matrix-v1",
            "protocol": self.cell.protocol,
            "row": self.cell.row,
            "column": self.cell.column,
            "model": self.cell.model.short,
            "expected": "Falsified" if self.cell.expected == ref.F else "BoundedSafe",
            "verdict": self.verdict,
            "states_explored": self.states,
            "random_schedules": self.random_schedules,
            "trace_length": len(self.trace) if self.trace else 0,
            "deviates": self.deviates,
        }


def sana_toggles(column: str):
    from ..protocols.base import INIT_NONE, INIT_OWNER, Toggles
    if column == "init-none":
        return Toggles(init=INIT_NONE, multi_owner=False)
    if column == "init-owner":
        return Toggles(init=INIT_OWNER, multi_owner=False)
    if column in ("dishonest-apk", "rogue-apk"):
        return Toggles(init=INIT_OWNER, multi_owner=False, dishonest_keys_in_apk=True)
    raise UsageError(f"unknown SANA model class {column!r}")


def build_instance(protocol: str, column: str):
    """The protocol instance a matrix cell is explored on."""
    from ..protocols.base import Toggles
    from ..protocols.sana import SanaProtocol
    from ..protocols.token_request import TokenRequestProtocol
    from ..protocols.toy import ToyProtocol
    if protocol == "toy":
        return ToyProtocol()
    if protocol == "token-request":
        return TokenRequestProtocol(Toggles(init=column), helpers=HELPERS)
    if protocol == "sana":
        # the aggregator only combines signatures the adversary can combine itself
        return SanaProtocol(sana_toggles(column), provers=2, helpers=HELPERS, aggregator=False)
    raise UsageError(f"unknown protocol {protocol!r}; expected one of {', '.join(PROTOCOLS)}")


def cells(protocol: str) -> list[Cell]:
    if protocol == "toy":
        return [Cell("toy", lem, m.short, m, lem, ref.TOY[m][lem]) for m in ModelId for lem in ref.TOY_LEMMAS]
    if protocol == "token-request":
        return [Cell("token-request", lem, init, ModelId.A4_Plain, lem, ref.TOKEN_REQUEST[(lem, init)])
                for lem in ref.TR_LEMMAS for init in ref.TR_INITS]
    if protocol == "sana":
        return [Cell("sana", lem, col, m, lem, ref.SANA[(lem, col)])
                for lem in ref.SANA_LEMMAS for col, models in ref.SANA_COLUMNS.items() for m in models]
    raise UsageError(f"unknown protocol {protocol!r}; expected one of {', '.join(PROTOCOLS)}")


def run_cell(cell: Cell, bounds: Bounds, monitor: bool = False, schedules: int = 0, seed: int = 0) -> CellResult:
    inst = build_instance(cell.protocol, cell.column)
    mon = RestrictionMonitor() if monitor else None
    ex = Explorer(inst, cell.model, inst.lemma(cell.lemma), bounds, mon)
    v = ex.explore()
    res = CellResult(cell, v.verdict, v.states_explored)
    if v.verdict == "Falsified":
        res.trace = v.trace
        res.replay_ok = check_lemma(v.trace, ex.lemma, ex.lctx)
    elif schedules:
        walker = Explorer(inst, cell.model, ex.lemma, bounds, mon, reduce=False)
        found = walker.random_schedules(schedules, seed)
        res.random_schedules = schedules
        if found is not None:
            res.verdict, res.trace = "Falsified", found.trace
            res.replay_ok = check_lemma(found.trace, ex.lemma, ex.lctx)
    if mon is not None:
        res.monitor_queries = mon.queries
        res.monitor_violations = tuple(mon.violations)
    return res


def _run(args) -> CellResult:
    return run_cell(*args)


def default_jobs() -> int:
    raw = os.environ.get("AGGSIG_JOBS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"AGGSIG_JOBS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("AGGSIG_JOBS must be at least 1")
    return n


@dataclass
class MatrixResult:
    protocol: str
    bounds: Bounds
    results: list = field(default_factory=list)

    @property
    def deviations(self) -> list[CellResult]:
        return [r for r in self.results if r.deviates]

    def render(self) -> str:
        lines = [f"matrix {self.protocol}  ({self.bounds.describe()})"]
        if self.protocol == "toy":
            rows = [m.short for m in ModelId]
            cols = list(ref.TOY_LEMMAS)
            get = {(r.cell.column, r.cell.row): [r] for r in self.results}
        else:
            rows = list(ref.TR_LEMMAS if self.protocol == "token-request" else ref.SANA_LEMMAS)
            cols = list(ref.TR_INITS if self.protocol == "token-request" else ref.SANA_COLUMNS)
            get: dict = {}
            for r in self.results:
                get.setdefault((r.cell.row, r.cell.column), []).append(r)
        width = max(len(c) for c in cols + ["BoundedSafe"]) + 2
        head = max(len(r) for r in rows) + 2
        lines.append(("".ljust(head) + "".join(c.ljust(width) for c in cols)).rstrip())
        for row in rows:
            out = row.ljust(head)
            for col in cols:
                out += _cell_text(get.get((row, col), [])).ljust(width)
            lines.append(out.rstrip())
        sched = [r for r in self.results if r.random_schedules]
        if sched:
            lines.append(f"bounded-safe cells also survived {sched[0].random_schedules} seeded random schedules each")
        if any(r.monitor_queries for r in self.results):
            q = sum(r.monitor_queries for r in self.results)
            v = sum(len(r.monitor_violations) for r in self.results)
            lines.append(f"restriction monitor: {q} verification queries, {v} violations")
        devs = self.deviations
        lines.append("matches reference table" if not devs else f"{len(devs)} deviation(s):")
        for r in devs:
            why = "counterexample does not replay" if not r.replay_ok else (
                "restriction violated" if r.monitor_violations else
                f"expected {'Falsified' if r.cell.expected == ref.F else 'BoundedSafe'}, got {r.verdict}")
            lines.append(f"  {r.cell.label}: {why}")
        return "\n".join(lines) + "\n"

    def records(self) -> str:
        return "".join(json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
                       for r in self.results)


def _cell_text(results: list) -> str:
    if not results:
        return "-"
    verdicts = {r.verdict for r in results}
    if len(verdicts) == 1:
        return verdicts.pop()
    return "/".join(f"{r.cell.model.short}:{r.short}" for r in results)


def run_matrix(protocol: str, bounds: Bounds | None = None, jobs: int | None = None, monitor: bool = False,
               schedules: int | None = None, seed: int = 0) -> MatrixResult:
    """Explore every cell of ``protocol``; bounded-safe SANA cells also get seeded random schedules."""
    todo = cells(protocol)
    bounds = bounds or SESSION_BOUNDS[protocol]
    if schedules is None:
        schedules = RANDOM_SCHEDULES if protocol == "sana" else 0
    args = [(c, bounds, monitor, schedules, seed + i) for i, c in enumerate(todo)]
    jobs = default_jobs() if jobs is None else jobs
    if jobs < 1:
        raise UsageError("jobs must be at least 1")
    if jobs == 1:
        results = [_run(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run, args))  # map keeps submission order
    return MatrixResult(protocol, bounds, results)
