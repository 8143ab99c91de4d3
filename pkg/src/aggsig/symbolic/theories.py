"""The six aggregate-signature theories.

Validation models (V1-V3) treat verification as an adversary-controlled oracle
constrained by three restrictions: honest-and-matching queries must verify
(correctness), honest positions must carry the matching signature for a true
result (unforgeability), and a repeated query gets the same answer
(consistency). Attack-finding models (A4-A6) verify only what an equation
matches exactly.
"""
from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import UsageError
from .terms import (IndexedAgg, Pk, RogueAgg, RoguePk, RogueSk, Sign, Term, ValidAgg, ZeroAgg)


class ModelId(enum.Enum):
    V1_NoDishonest = 1
    V2_Dishonest = 2
    V3_RogueKey = 3
    A4_Plain = 4
    A5_Colliding = 5
    A6_RogueKey = 6

    @property
    def short(self) -> str:
        return self.name.split("_")[0]

    @property
    def validation(self) -> bool:
        return self.value <= 3

    @classmethod
    def parse(cls, text: str) -> "ModelId":
        t = text.strip()
        for m in cls:
            if t in (m.name, m.short, str(m.value), m.short.lower()):
                return m
        raise UsageError(f"unknown model {text!r}; expected one of "
                         + ", ".join(m.short for m in cls))


class Rule(enum.Enum):
    AGGREGATE_VALID = "aggregate-valid"
    REGISTER_DISHONEST = "register-dishonest"
    REGISTER_ROGUE = "register-rogue"
    ROGUE_AGGREGATE = "rogue-aggregate"
    ROGUE_EXTEND = "rogue-extend"
    ZERO_AGGREGATE = "zero-aggregate"


_RULES = {
    ModelId.V1_NoDishonest: {Rule.AGGREGATE_VALID},
    ModelId.V2_Dishonest: {Rule.AGGREGATE_VALID, Rule.REGISTER_DISHONEST},
    ModelId.V3_RogueKey: {Rule.AGGREGATE_VALID, Rule.REGISTER_DISHONEST, Rule.REGISTER_ROGUE,
                          Rule.ROGUE_AGGREGATE, Rule.ROGUE_EXTEND},
    ModelId.A4_Plain: {Rule.AGGREGATE_VALID},
    ModelId.A5_Colliding: {Rule.AGGREGATE_VALID, Rule.REGISTER_DISHONEST, Rule.ZERO_AGGREGATE},
    ModelId.A6_RogueKey: {Rule.AGGREGATE_VALID, Rule.REGISTER_DISHONEST, Rule.REGISTER_ROGUE,
                          Rule.ROGUE_AGGREGATE, Rule.ROGUE_EXTEND},
}


def adversary_rules(model: ModelId) -> frozenset[Rule]:
    return frozenset(_RULES[model])


@dataclass(frozen=True)
class KeyRegistry:
    honest: frozenset = frozenset()
    dishonest: frozenset = frozenset()
    rogue: tuple = ()  # sorted (rogue_pk, target_pk) pairs

    def __post_init__(self):
        if self.honest & self.dishonest:
            raise UsageError("a key cannot be both honest and dishonest")
        for r, _ in self.rogue:
            if r not in self.dishonest:
                raise UsageError("rogue keys must be registered as dishonest")

    def register_dishonest(self, pk: Term) -> "KeyRegistry":
        return KeyRegistry(self.honest, self.dishonest | {pk}, self.rogue)

    def register_rogue(self, pk: Term, target: Term) -> "KeyRegistry":
        rogue = tuple(sorted(set(self.rogue) | {(pk, target)}))
        return KeyRegistry(self.honest, self.dishonest | {pk}, rogue)

    @property
    def rogue_keys(self) -> frozenset:
        return frozenset(r for r, _ in self.rogue)

    def registered(self, pk: Term) -> bool:
        return pk in self.honest or pk in self.dishonest


Pair = tuple  # (msg, pk, index)


def canonical_pairs(pairs: Iterable[Pair]) -> tuple[Pair, ...]:
    return tuple(sorted(pairs, key=lambda p: (p[2], p[0].key, p[1].key)))


def _multiset(pairs) -> Counter:
    return Counter((m, pk) for m, pk, *_ in pairs)


@dataclass(frozen=True)
class VerificationOracle:
    """Memo of earlier oracle answers; never remaps a key."""

    memo: frozenset = frozenset()  # of ((agg, pairs), bool)

    def lookup(self, agg: Term, pairs) -> bool | None:
        for (a, p), v in self.memo:
            if a == agg and p == pairs:
                return v
        return None

    def record(self, agg: Term, pairs, value: bool) -> "VerificationOracle":
        prior = self.lookup(agg, pairs)
        if prior is not None:
            if prior != value:
                raise AssertionError("consistency violation: oracle remapped a query")
            return self
        return VerificationOracle(self.memo | {((agg, pairs), value)})


@dataclass
class Verdict:
    """Outcome of one symbolic verification query with its reasons (for instrumentation)."""

    allowed: frozenset
    forced: bool = False
    blocked: bool = False
    memo_hit: bool = False
    conflict: bool = False


TRUE = frozenset({True})
FALSE = frozenset({False})
BOTH = frozenset({True, False})


def _matching(sig: Term, m: Term, pk: Term) -> bool:
    return isinstance(sig, Sign) and sig.msg == m and Pk(sig.sk) == pk


def vfy_validation(model: ModelId, oracle: VerificationOracle, registry: KeyRegistry,
                   agg: Term, pairs: Sequence[Pair]) -> Verdict:
    if not isinstance(agg, IndexedAgg):
        raise UsageError("validation models verify only agg(...) shaped terms")
    pairs = canonical_pairs(pairs)
    by_idx = {i: s for s, i in agg.entries}
    if not pairs or len(pairs) != len(by_idx) or {p[2] for p in pairs} != set(by_idx):
        raise UsageError("pairs must be index-aligned with the aggregate")
    allowed = BOTH
    forced = blocked = False
    honest_like = registry.honest | (registry.rogue_keys if model is ModelId.V3_RogueKey else frozenset())
    matches = [_matching(by_idx[i], m, pk) for m, pk, i in pairs]
    if all(matches) and all(pk in honest_like for _, pk, _ in pairs):
        allowed, forced = TRUE, True
    if any(pk in registry.honest and not ok for (_, pk, _), ok in zip(pairs, matches)):
        allowed, blocked = allowed & FALSE, True
    memo = oracle.lookup(agg, pairs)
    conflict = False
    if memo is not None:
        narrowed = allowed & frozenset({memo})
        conflict = not narrowed
        allowed = narrowed
    return Verdict(allowed, forced, blocked, memo is not None, conflict)


def _zero_matches(agg: ZeroAgg, pairs) -> bool:
    n, k = len(pairs), len(agg.zero_pks)
    if n != k + len(agg.valid.msgs):
        return False
    want_zero = Counter(agg.zero_pks)
    want_rest = Counter(agg.valid.pairs())
    for zpos in itertools.combinations(range(n), k):
        zs = Counter(pairs[i][1] for i in zpos)
        rest = Counter((pairs[i][0], pairs[i][1]) for i in range(n) if i not in zpos)
        if zs == want_zero and rest == want_rest:
            return True
    return False


def vfy_attack(model: ModelId, agg: Term, pairs: Sequence[Pair]) -> Verdict:
    if not pairs:
        raise UsageError("verification needs at least one (message, key) pair")
    ms = _multiset(pairs)
    if isinstance(agg, ValidAgg):
        ok = ms == Counter(agg.pairs())
    elif isinstance(agg, RogueAgg):
        ok = model is ModelId.A6_RogueKey and ms == Counter(agg.pairs())
    elif isinstance(agg, ZeroAgg):
        ok = model is ModelId.A5_Colliding and _zero_matches(agg, list(pairs))
    else:
        ok = False
    return Verdict(TRUE if ok else FALSE, forced=ok)


def vfy_symbolic_verdict(model: ModelId, oracle: VerificationOracle, registry: KeyRegistry,
                         agg: Term, pairs: Sequence[Pair]) -> Verdict:
    if model.validation:
        return vfy_validation(model, oracle, registry, agg, pairs)
    return vfy_attack(model, agg, pairs)


def vfy_symbolic(model: ModelId, oracle: VerificationOracle, registry: KeyRegistry,
                 agg: Term, pairs: Sequence[Pair]) -> frozenset:
    """Set of verification results the model allows for this query."""
    return vfy_symbolic_verdict(model, oracle, registry, agg, pairs).allowed


# Constructors used by honest aggregators and adversary rules --------------

def aggregate_signatures(model: ModelId, sigs: Sequence[Term]) -> Term:
    sigs = sorted(set(sigs))
    if not sigs:
        raise UsageError("cannot aggregate zero signatures")
    if model.validation:
        return IndexedAgg.of(sigs)
    if not all(isinstance(s, Sign) for s in sigs):
        raise UsageError("attack-finding aggregation needs sign(m, sk) terms")
    return ValidAgg([s.msg for s in sigs], [Pk(s.sk) for s in sigs])


def rogue_pk(model: ModelId, target: Term) -> Term:
    if model is ModelId.V3_RogueKey:
        return Pk(RogueSk(target))
    if model is ModelId.A6_RogueKey:
        return RoguePk(target)
    raise UsageError(f"{model.short} has no rogue keys")


def rogue_aggregate(model: ModelId, m: Term, target: Term, extra: Sequence[Term] = ()) -> Term:
    """Rogue aggregate on (m, m) for ``target`` and its rogue key, optionally extended."""
    if not isinstance(target, Pk):
        raise UsageError("rogue target must be a pk(sk) term")
    extra = sorted(set(extra))
    if model is ModelId.V3_RogueKey:
        base = [Sign(m, target.sk), Sign(m, RogueSk(target))]
        if set(base) & set(extra):
            raise UsageError("duplicate signature in rogue extension")
        return IndexedAgg.of(base + list(extra))
    if model is ModelId.A6_RogueKey:
        msgs = [m, m] + [s.msg for s in extra]
        pks = [target, RoguePk(target)] + [Pk(s.sk) for s in extra]
        return RogueAgg(msgs, pks)
    raise UsageError(f"{model.short} has no rogue aggregation")


def zero_aggregate(valid: ValidAgg, zero_pks: Sequence[Term]) -> ZeroAgg:
    return ZeroAgg(valid, tuple(zero_pks))


def agg_size(agg: Term) -> int:
    if isinstance(agg, IndexedAgg):
        return len(agg.entries)
    if isinstance(agg, (ValidAgg, RogueAgg)):
        return len(agg.msgs)
    if isinstance(agg, ZeroAgg):
        return len(agg.valid.msgs) + len(agg.zero_pks)
    return 0


def adversary_aggregates(model: ModelId, sigs: Iterable[Term], registry: KeyRegistry,
                         vocab: Sequence[Term], max_size: int) -> list[Term]:
    """Every aggregate the adversary can assemble from the given signatures.

    ``sigs`` are signature terms the adversary can produce (received or signed
    with its own keys); ``vocab`` bounds the messages used by the rogue rule.
    """
    rules = adversary_rules(model)
    sigs = sorted(set(s for s in sigs if isinstance(s, Sign)))
    out = set()
    subsets = [c for r in range(1, max_size + 1) for c in itertools.combinations(sigs, r)]
    if Rule.AGGREGATE_VALID in rules:
        out.update(aggregate_signatures(model, c) for c in subsets)
    if Rule.ROGUE_AGGREGATE in rules:
        exts = [()] + ([c for c in subsets if len(c) <= max_size - 2]
                       if Rule.ROGUE_EXTEND in rules else [])
        for _, target in registry.rogue:
            for m in vocab:
                for ext in exts:
                    try:
                        out.add(rogue_aggregate(model, m, target, ext))
                    except UsageError:
                        pass
    if Rule.ZERO_AGGREGATE in rules:
        zero_keys = sorted(registry.dishonest)
        for zk in zero_keys:
            for c in subsets:
                if len(c) + 1 <= max_size:
                    valid = aggregate_signatures(model, c)
                    out.add(zero_aggregate(valid, (zk,)))
    return sorted(out)


def plausible_pairs(model: ModelId, registry: KeyRegistry, agg: Term,
                    vocab: Sequence[Term]) -> list[tuple[Pair, ...]]:
    """Pair lists for which a true verdict is not ruled out.

    Necessary condition only (memo is ignored). Used to generate verifier
    inputs; a false verdict aborts the verifier, so other inputs are useless.
    """
    out = []
    if model.validation:
        if not isinstance(agg, IndexedAgg):
            return []
        dishonest = sorted(registry.dishonest) if model is not ModelId.V1_NoDishonest else []
        options = []
        for sig, i in agg.entries:
            opts = []
            if isinstance(sig, Sign) and registry.registered(Pk(sig.sk)):
                opts.append((sig.msg, Pk(sig.sk), i))
            for d in dishonest:
                for m in vocab:
                    p = (m, d, i)
                    if p not in opts:
                        opts.append(p)
            if not opts:
                return []
            options.append(opts)
        for combo in itertools.product(*options):
            out.append(canonical_pairs(combo))
        return sorted(set(out), key=lambda ps: [(p[0].key, p[1].key, p[2]) for p in ps])
    if isinstance(agg, ValidAgg) or (isinstance(agg, RogueAgg) and model is ModelId.A6_RogueKey):
        return [tuple((m, pk, i + 1) for i, (m, pk) in enumerate(agg.pairs()))]
    if isinstance(agg, ZeroAgg) and model is ModelId.A5_Colliding:
        base = [(m, pk) for m, pk in agg.valid.pairs()]
        for ms in itertools.product(vocab, repeat=len(agg.zero_pks)):
            lst = list(zip(ms, agg.zero_pks)) + base
            out.append(tuple((m, pk, i + 1) for i, (m, pk) in enumerate(lst)))
        return out
    return []


def targeted_aggregates(model: ModelId, registry: KeyRegistry, want: Sequence[tuple],
                        have_sig, max_size: int) -> list[Term]:
    """Aggregates the adversary can build that could verify against exactly ``want``.

    ``want`` is a list of (message, pk) claims and ``have_sig(sig)`` says whether
    a plain signature term is derivable. Positions under dishonest keys get the
    matching signature: in the validation models the oracle ignores what sits
    there, so any other choice yields the same verdicts and events.
    """
    rules = adversary_rules(model)
    want = list(want)
    if not want or len(want) > max_size:
        return []

    def plain(m, pk):
        if isinstance(pk, Pk) and not isinstance(pk.sk, RogueSk):
            s = Sign(m, pk.sk)
            return s if have_sig(s) else None
        return None

    out = set()
    sigs = [plain(m, pk) for m, pk in want]
    if all(s is not None for s in sigs) and Rule.AGGREGATE_VALID in rules:
        out.add(aggregate_signatures(model, sigs) if model.validation else ValidAgg([m for m, _ in want],
                                                                                    [pk for _, pk in want]))
    if Rule.ROGUE_AGGREGATE in rules:
        for rogue, target in registry.rogue:
            for m in {m for m, pk in want if pk == target}:
                if (m, rogue) not in want:
                    continue
                rest = list(want)
                rest.remove((m, target))
                rest.remove((m, rogue))
                ext = [plain(mm, pk) for mm, pk in rest]
                if any(s is None for s in ext) or (ext and Rule.ROGUE_EXTEND not in rules):
                    continue
                try:
                    out.add(rogue_aggregate(model, m, target, ext))
                except UsageError:
                    pass
    if Rule.ZERO_AGGREGATE in rules:
        for i, (_, zk) in enumerate(want):
            if zk not in registry.dishonest:
                continue
            rest = want[:i] + want[i + 1:]
            ext = [plain(mm, pk) for mm, pk in rest]
            if rest and all(s is not None for s in ext):
                out.add(zero_aggregate(aggregate_signatures(model, ext), (zk,)))
    return sorted(out)
