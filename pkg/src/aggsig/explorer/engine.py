"""Bounded depth-first exploration of role machines against a Dolev-Yao adversary.

The engine knows nothing about any particular protocol. A protocol instance
provides role machines that, given a session and a read-only ``World``,
enumerate their possible next steps. The engine interleaves those steps with
the adversary's key registrations, asks the active aggregate-signature theory
about every verification, and evaluates one lemma incrementally.

Verification queries that cannot return true are not expanded: the verifying
session would abort, which adds no events and only constrains later oracle
answers, so every violation reachable through such a branch is also reachable
without it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from ..errors import UsageError
from ..symbolic.deduction import Knowledge
from ..symbolic.terms import AGG_TYPES, Name, Pk, Sign, Term
from ..symbolic import theories as th
from ..symbolic.theories import KeyRegistry, ModelId, Rule, VerificationOracle
from .events import FACT_KINDS, Event, TraceEvent, vfy_evt
from .lemmas import Lemma, LemmaContext, LemmaKind, _commit_in_scope, violates

DONE = -1

# Fact kinds each lemma consults when judging a later event.
_RELEVANT = {
    LemmaKind.MessageAuthenticity: {"Sign"},
    LemmaKind.NoRogueKey: {"Sign"},
    LemmaKind.NoSplittingZero: {"VfyAgg"},
    LemmaKind.WeakAgreement: {"Running"},
    LemmaKind.NonInjectiveAgreement: {"Running"},
    LemmaKind.Aliveness: set(),
}


@dataclass(frozen=True)
class Bounds:
    max_sessions_per_role: int = 2
    max_agg_size: int = 3
    deduction_depth: int = 4
    max_trace_length: int = 30

    def __post_init__(self):
        for k, v in self.to_dict().items():
            if not isinstance(v, int) or v <= 0:
                raise UsageError(f"bound {k} must be a positive integer, got {v!r}")

    def to_dict(self) -> dict:
        return {"max_sessions_per_role": self.max_sessions_per_role, "max_agg_size": self.max_agg_size,
                "deduction_depth": self.deduction_depth, "max_trace_length": self.max_trace_length}

    def override(self, **kw) -> "Bounds":
        unknown = set(kw) - set(self.to_dict())
        if unknown:
            raise UsageError(f"unknown bound(s): {', '.join(sorted(unknown))}")
        return replace(self, **kw)

    def describe(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.to_dict().items())


@dataclass(frozen=True)
class Slot:
    kind: str
    actor: str
    sid: int


@dataclass(frozen=True)
class Session:
    slot: int
    pc: int = 0
    env: tuple = ()

    def get(self, name: str, default=None):
        for k, v in self.env:
            if k == name:
                return v
        return default

    def step(self, pc: int, drop: tuple = (), **updates) -> "Session":
        """Advance to ``pc``. Locals named in ``drop`` are forgotten so equivalent sessions compare equal."""
        env = {k: v for k, v in self.env if k not in drop}
        env.update(updates)
        return Session(self.slot, pc, tuple(sorted(env.items(), key=lambda kv: kv[0])))

    def finish(self) -> "Session":
        # a finished session has no further use for its locals
        return Session(self.slot, DONE)


@dataclass(frozen=True)
class Move:
    """One role step. If ``vfy`` is set the step happens only when verification returns true."""

    slot: int
    session: Session
    events: tuple = ()
    outputs: tuple = ()
    recv: Term | None = None
    vfy: tuple | None = None  # (agg, pairs)


@dataclass(frozen=True)
class AdvMove:
    key: tuple
    events: tuple
    registry: KeyRegistry
    outputs: tuple = ()


@dataclass(frozen=True)
class State:
    sessions: tuple
    knowledge: Knowledge
    registry: KeyRegistry
    oracle: VerificationOracle
    facts: frozenset
    active: frozenset
    done_adv: frozenset



@dataclass(frozen=True)
class Falsified:
    trace: tuple
    states_explored: int
    lemma: str = ""

    verdict = "Falsified"


@dataclass(frozen=True)
class BoundedSafe:
    bounds: Bounds
    states_explored: int
    random_schedules: int = 0

    verdict = "BoundedSafe"


class RestrictionMonitor:
    """Re-checks the three validation-model restrictions on every verification query.

    The checks are written independently of the theory code so that a bug in
    either shows up as a violation.
    """

    def __init__(self):
        self.queries = 0
        self.true_results = 0
        self.violations: list[str] = []

    def observe(self, model: ModelId, registry: KeyRegistry, oracle: VerificationOracle,
                agg: Term, pairs, verdict: th.Verdict, facts: frozenset) -> None:
        self.queries += 1
        if not model.validation:
            return
        if verdict.conflict:
            self.violations.append(f"consistency: memo conflict on {agg}")
        prior = oracle.lookup(agg, th.canonical_pairs(pairs))
        if prior is not None and verdict.allowed != frozenset({prior}):
            self.violations.append(f"consistency: re-query of {agg} not pinned to {prior}")
        sigs = {i: s for s, i in agg.entries}
        honest = registry.honest
        if model is ModelId.V3_RogueKey:
            honest = honest | registry.rogue_keys
        all_good = all(isinstance(sigs[i], Sign) and sigs[i].msg == m and Pk(sigs[i].sk) == pk and pk in honest
                       for m, pk, i in pairs)
        if all_good and prior is None and verdict.allowed != frozenset({True}):
            self.violations.append(f"correctness: honest matching query on {agg} not forced true")

    def observe_true(self, model: ModelId, registry: KeyRegistry, pairs, facts: frozenset) -> None:
        self.true_results += 1
        if model in (ModelId.V1_NoDishonest, ModelId.V2_Dishonest):
            for m, pk, _ in pairs:
                if pk in registry.honest and ("Sign", (m, pk)) not in facts:
                    self.violations.append(f"unforgeability: true verdict for unsigned ({m}, {pk})")


class World:
    """Read-only view of one state handed to role machines."""

    def __init__(self, engine: "Explorer", state: State):
        self.engine = engine
        self.state = state
        self.instance = engine.instance
        self.model = engine.model
        self.bounds = engine.bounds
        self.knowledge = state.knowledge
        self.registry = state.registry
        self.memo: dict = {}  # per-state scratch space for protocol helpers

    def derivable(self, t: Term) -> bool:
        return self.knowledge.can_derive(t, self.bounds.deduction_depth)

    def session(self, slot: int) -> Session:
        return self.state.sessions[slot]

    def slot(self, slot: int) -> Slot:
        return self.instance.slots[slot]

    @cached_property
    def vocab(self) -> list[Term]:
        return self.instance.message_vocab(self)

    @cached_property
    def wanted(self) -> frozenset:
        """(payload, signer) pairs some pending check could consume; signer None means anyone."""
        out = set()
        for s in self.state.sessions:
            if s.pc != DONE:
                out.update(self.instance.roles[self.instance.slots[s.slot].kind].wanted(s, self))
        return frozenset(out)

    def wanted_from(self, identity: str) -> list[Term]:
        return sorted({p for p, who in self.wanted if who is None or who == identity})

    @cached_property
    def payloads(self) -> list[Term]:
        """Atoms the adversary knows plus every wanted payload."""
        return sorted(set(self.vocab) | {p for p, _ in self.wanted})

    @cached_property
    def adversary_sks(self) -> list[Term]:
        return sorted(t for t in self.knowledge if isinstance(t, Name) and self.instance.is_secret_key(t))

    @cached_property
    def sig_pool(self) -> list[Term]:
        sigs = {t for t in self.knowledge if isinstance(t, Sign)}
        for sk in self.adversary_sks:
            if self.registry.registered(Pk(sk)):
                for m in self.payloads:
                    sigs.add(Sign(m, sk))
        return sorted(sigs)

    @cached_property
    def aggregates(self) -> list[Term]:
        known = {t for t in self.knowledge if isinstance(t, AGG_TYPES)}
        made = th.adversary_aggregates(self.model, self.sig_pool, self.registry, self.payloads,
                                       self.bounds.max_agg_size)
        return sorted(known | set(made))

    def plausible_pairs(self, agg: Term) -> list:
        return th.plausible_pairs(self.model, self.registry, agg, self.vocab)


class Explorer:
    def __init__(self, instance, model: ModelId, lemma: Lemma, bounds: Bounds,
                 monitor: RestrictionMonitor | None = None, reduce: bool = True):
        self.instance = instance
        self.model = model
        self.lemma = lemma
        self.bounds = bounds
        self.monitor = monitor
        self.rules = instance.adversary_rules(model)
        self.slots = instance.active_slots(bounds)
        self.lctx = LemmaContext(instance.honest_identities, instance.honest_pks,
                                 {s.actor: s.kind for s in instance.slots})
        self.states = 0
        self._relevant = _RELEVANT[lemma.kind]
        self._move_cache: dict = {}
        # skip inert last steps; random schedules turn this off to cross-check it
        self.reduce = reduce

    def _fact_relevant(self, fact) -> bool:
        kind, args = fact
        if kind not in self._relevant:
            return False
        if self.lemma.kind is LemmaKind.NonInjectiveAgreement:
            return args[3] == self.lemma.tag
        return True

    def _visible(self, ev: Event) -> bool:
        """Could this event matter to the lemma, now or later?"""
        if ev.kind in ("Send", "Recv", "OracleChoice"):
            return False
        if ev.kind == "Commit":
            return _commit_in_scope(self.lemma, self.lctx, ev)
        if ev.kind == "VfyAgg":
            return self.lemma.kind in (LemmaKind.MessageAuthenticity, LemmaKind.NoRogueKey,
                                       LemmaKind.NoSplittingZero)
        return ev.kind in FACT_KINDS and self._fact_relevant(ev.fact)

    def _inert(self, state: State, move: Move) -> bool:
        """A last step that changes nothing the lemma or the adversary can see.

        Skipping it loses no violation: it ends its session, adds no knowledge,
        emits nothing the lemma reads and (outside aliveness) activity is not
        tracked. A skipped verification also leaves the oracle memo unconstrained.
        """
        if move.session.pc != DONE or move.outputs:
            return False
        if self.lemma.kind is LemmaKind.Aliveness:
            return False
        if move.vfy is not None and self.lemma.kind in (LemmaKind.MessageAuthenticity, LemmaKind.NoRogueKey,
                                                         LemmaKind.NoSplittingZero):
            return False
        return not any(self._visible(e) for e in move.events)

    def key(self, state: State) -> tuple:
        """Identity of a state as far as the rest of the search is concerned.

        Only facts the lemma can look back at are kept. Oracle memo entries are
        dropped: only true answers are ever expanded, and a repeated query that
        was allowed to be true stays allowed, so the memo never changes which
        moves succeed.
        """
        facts = frozenset(f for f in state.facts if self._fact_relevant(f))
        active = state.active if self.lemma.kind is LemmaKind.Aliveness else bool(state.active)
        return (state.sessions, state.knowledge.ids, state.registry, facts, active, state.done_adv)

    # state construction -------------------------------------------------

    def initial(self) -> tuple[State, list[Event]]:
        registry = self.instance.initial_registry()
        events = [Event("PKI", "RegisterHonest", (pk,)) for pk in sorted(registry.honest)]
        events += [Event("PKI", "RegisterDishonest", (pk,)) for pk in sorted(registry.dishonest)]
        sessions = tuple(Session(i) for i in range(len(self.instance.slots)))
        k = Knowledge(self.instance.initial_knowledge(), self.bounds.deduction_depth)
        facts = frozenset(e.fact for e in events)
        return State(sessions, k, registry, VerificationOracle(), facts, frozenset(), frozenset()), events

    def moves(self, state: State) -> list:
        world = World(self, state)
        out: list = []
        started = set()
        for i, sess in enumerate(state.sessions):
            if sess.pc == DONE or i not in self.slots:
                continue
            slot = self.instance.slots[i]
            group = (slot.kind, slot.actor)
            if sess.pc == 0:
                # sessions of one actor are interchangeable: start them in order
                if group in started:
                    continue
                started.add(group)
            # role moves depend only on the session, the knowledge, the registry
            # and what other sessions are waiting for
            ck = (sess, state.knowledge.ids, state.registry, world.wanted)
            mv = self._move_cache.get(ck)
            if mv is None:
                mv = self.instance.roles[slot.kind].moves(sess, world)
                if len(self._move_cache) < 100_000:
                    self._move_cache[ck] = mv
            out.extend(m for m in mv if not (self.reduce and self._inert(state, m)))
        out.extend(self.instance.adversary_moves(world, self.rules, state.done_adv))
        return out

    def apply(self, state: State, move) -> tuple[State, list[Event]] | None:
        if isinstance(move, AdvMove):
            evs = list(move.events)
            k = state.knowledge.add(move.outputs, self.bounds.deduction_depth)
            facts = state.facts | {e.fact for e in evs if e.kind in FACT_KINDS}
            return State(state.sessions, k, move.registry, state.oracle, facts, state.active,
                         state.done_adv | {move.key}), evs
        actor = self.instance.slots[move.slot].actor
        evs: list[Event] = []
        oracle = state.oracle
        if move.recv is not None:
            evs.append(Event(actor, "Recv", (move.recv,)))
        if move.vfy is not None:
            agg, pairs = move.vfy
            pairs = th.canonical_pairs(pairs)
            verdict = th.vfy_symbolic_verdict(self.model, oracle, state.registry, agg, pairs)
            if self.monitor is not None:
                self.monitor.observe(self.model, state.registry, oracle, agg, pairs, verdict, state.facts)
            if True not in verdict.allowed:
                return None
            if len(verdict.allowed) > 1:
                evs.append(Event(actor, "OracleChoice", (agg, pairs, True)))
            if self.model.validation:
                oracle = oracle.record(agg, pairs, True)
            evs.append(vfy_evt(actor, agg, pairs, True))
            if self.monitor is not None:
                self.monitor.observe_true(self.model, state.registry, pairs, state.facts)
        evs.extend(move.events)
        evs.extend(Event(actor, "Send", (o,)) for o in move.outputs)
        sessions = state.sessions[:move.slot] + (move.session,) + state.sessions[move.slot + 1:]
        k = state.knowledge.add(move.outputs, self.bounds.deduction_depth)
        facts = state.facts | {e.fact for e in evs if e.kind in FACT_KINDS}
        return State(sessions, k, state.registry, oracle, facts, state.active | {actor},
                     state.done_adv), evs

    def _violation(self, state: State, evs: Sequence[Event]) -> bool:
        facts = set(state.facts)
        active = set(state.active)
        for ev in evs:
            if violates(self.lemma, self.lctx, ev, facts, active):
                return True
            if ev.kind in FACT_KINDS:
                facts.add(ev.fact)
            active.add(ev.actor)
        return False

    # search -----------------------------------------------------------------

    def explore(self, deepening: bool = True):
        """Exhaustive search up to the bounds; returns the first violation found.

        With ``deepening`` the depth limit grows geometrically up to
        ``max_trace_length``, so short counterexamples are found before the
        search wanders into long unrelated interleavings. The final pass is a
        full search at the configured bound either way.
        """
        limit = self.bounds.max_trace_length
        limits = []
        if deepening:
            d = 4
            while d < limit:
                limits.append(d)
                d *= 2
        limits.append(limit)
        for lim in limits:
            self.states = 0
            self._cut = False
            found = self._dfs(lim)
            if found is not None:
                return Falsified(tuple(TraceEvent(i, e) for i, e in enumerate(found)), self.states,
                                 self.lemma.label)
            if not self._cut:
                break  # nothing was cut off, so deeper passes would repeat this one
        return BoundedSafe(self.bounds, self.states)

    def _dfs(self, limit: int):
        init, init_events = self.initial()
        trace: list[Event] = list(init_events)
        visited: dict = {}

        def dfs(state: State, depth: int):
            if self._seen(visited, state, depth):
                return None
            self.states += 1
            if depth >= limit:
                self._cut = True
                return None
            for mv in self.moves(state):
                res = self.apply(state, mv)
                if res is None:
                    continue
                nxt, evs = res
                n = len(trace)
                trace.extend(evs)
                if self._violation(state, evs):
                    return tuple(trace)
                found = dfs(nxt, depth + 1)
                if found is not None:
                    return found
                del trace[n:]
            return None

        return dfs(init, 0)

    def _seen(self, visited: dict, state: State, depth: int) -> bool:
        key = self.key(state)
        seen = visited.get(key)
        if seen is not None and seen <= depth:
            return True
        visited[key] = depth
        return False

    def random_schedules(self, count: int, seed: int, cache_limit: int = 200_000):
        """Seeded random walks through the same transition system; first violation wins."""
        rng = random.Random(seed)
        init, init_events = self.initial()
        cache: dict = {}
        for _ in range(count):
            state, trace = init, list(init_events)
            for _depth in range(self.bounds.max_trace_length):
                key = self.key(state)
                succ = cache.get(key)
                if succ is None:
                    succ = [r for r in (self.apply(state, mv) for mv in self.moves(state)) if r is not None]
                    if len(cache) < cache_limit:
                        cache[key] = succ
                    self.states += 1
                if not succ:
                    break
                nxt, evs = succ[rng.randrange(len(succ))]
                trace.extend(evs)
                if self._violation(state, evs):
                    return Falsified(tuple(TraceEvent(i, e) for i, e in enumerate(trace)), self.states,
                                     self.lemma.label)
                state = nxt
        return None

    def replay(self, schedule: Iterable) -> tuple[list[Event], bool]:
        """Run a fixed schedule of move selectors; return the trace and whether the lemma broke.

        Each selector is a callable ``(moves, world) -> move``; it must pick one
        of the offered moves, so every step re-validates against the rules.
        """
        state, init_events = self.initial()
        trace = list(init_events)
        for pick in schedule:
            world = World(self, state)
            options = self.moves(state)
            mv = pick(options, world)
            if mv is None or mv not in options:
                raise UsageError("scripted step is not enabled in this state")
            res = self.apply(state, mv)
            if res is None:
                raise UsageError("scripted verification does not succeed in this model")
            nxt, evs = res
            trace.extend(evs)
            if self._violation(state, evs):
                return trace, True
            state = nxt
        return trace, False


def explore(instance, model: ModelId, lemma: Lemma, bounds: Bounds, monitor: RestrictionMonitor | None = None):
    return Explorer(instance, model, lemma, bounds, monitor).explore()
