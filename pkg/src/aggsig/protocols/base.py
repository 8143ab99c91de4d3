"""Shared scaffolding for protocol instances explored by the engine."""
from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field

from ..errors import UsageError
from ..explorer.engine import AdvMove, Bounds, Move, Session, Slot, World
from ..explorer.events import Event
from ..explorer.lemmas import Lemma
from ..symbolic.terms import Name, Nonce, Pk, Sign, Term, Tup
from ..symbolic.theories import KeyRegistry, ModelId, Rule, adversary_rules, rogue_pk

ADVERSARY = "E"
ADV_SK = Name("sk_adv")
INERT = Name("junk")

INIT_NONE = "None"
INIT_OWNER = "OwnerIdentity"
INIT_MODES = (INIT_NONE, INIT_OWNER)


@lru_cache(maxsize=None)
def sk_of(identity: str) -> Name:
    return Name(f"sk_{identity}")


@lru_cache(maxsize=None)
def pk_of(identity: str) -> Pk:
    return Pk(sk_of(identity))


@dataclass(frozen=True)
class Toggles:
    init: str = INIT_NONE
    dishonest_keys_in_apk: bool = False
    multi_owner: bool = True
    rogue_registration: bool = True

    def __post_init__(self):
        if self.init not in INIT_MODES:
            raise UsageError(f"init must be one of {', '.join(INIT_MODES)}, got {self.init!r}")


@dataclass(frozen=True)
class RoleSpec:
    kind: str
    actor: str
    sessions: int = 1


class Role:
    kind = ""

    def __init__(self, protocol: "ProtocolInstance"):
        self.p = protocol

    def moves(self, sess: Session, world: World) -> list[Move]:
        raise NotImplementedError

    def wanted(self, sess: Session, world: World) -> list[tuple]:
        """(payload, signer) pairs this session could still consume; signer None means any key.

        Receive slots that take an arbitrary term range over these plus ``INERT``:
        a term nobody will ever check is interchangeable with any other.
        """
        return []


class ProtocolInstance:
    """A set of role machines plus the adversary's initial position."""

    name = ""
    lemmas: dict[str, Lemma] = {}

    def __init__(self, specs: list[RoleSpec], roles: dict[str, Role], honest: list[str],
                 compromised: list[str] = (), public: list[Term] = (), toggles: Toggles = Toggles()):
        self.toggles = toggles
        self.roles = roles
        self.slots = [Slot(s.kind, s.actor, i) for s in specs for i in range(s.sessions)]
        self.honest_identities = frozenset(honest)
        self.compromised = tuple(compromised)
        self.honest_pks = frozenset(pk_of(x) for x in honest)
        self.public = tuple(public)
        self._secret = {sk_of(x) for x in list(honest) + list(compromised)} | {ADV_SK}

    # engine hooks ---------------------------------------------------------

    def adversary_rules(self, model: ModelId) -> frozenset:
        return adversary_rules(model)

    def active_slots(self, bounds: Bounds) -> frozenset:
        out, seen = set(), {}
        for i, s in enumerate(self.slots):
            n = seen.get((s.kind, s.actor), 0)
            if n < bounds.max_sessions_per_role:
                out.add(i)
            seen[(s.kind, s.actor)] = n + 1
        return frozenset(out)

    def initial_registry(self) -> KeyRegistry:
        return KeyRegistry(self.honest_pks, frozenset(pk_of(x) for x in self.compromised))

    def initial_knowledge(self) -> list[Term]:
        known = list(self.public) + [pk_of(x) for x in sorted(self.honest_identities)]
        for x in self.compromised:
            known += [sk_of(x), pk_of(x)]
        known.append(ADV_SK)
        return known

    def is_secret_key(self, t: Term) -> bool:
        return t in self._secret

    def message_vocab(self, world: World) -> list[Term]:
        return [t for t in world.knowledge.atoms() if not self.is_secret_key(t)]

    def owner_of(self, pk: Term) -> str:
        if isinstance(pk, Pk) and isinstance(pk.sk, Name) and pk.sk.label.startswith("sk_"):
            x = pk.sk.label[3:]
            if x in self.honest_identities or x in self.compromised:
                return x
        return ADVERSARY

    def rogue_targets(self) -> list[Term]:
        return sorted(self.honest_pks)

    def adversary_moves(self, world: World, rules: frozenset, done: frozenset) -> list[AdvMove]:
        # Registering a key never disables anything, so registrations are only
        # offered before the first role step and in a fixed order.
        if world.state.active:
            return []
        reg = world.registry
        cands = []
        if Rule.REGISTER_DISHONEST in rules:
            pk = Pk(ADV_SK)
            cands.append(AdvMove(("0dishonest", pk), (Event(ADVERSARY, "RegisterDishonest", (pk,)),),
                                 reg.register_dishonest(pk), (pk,)))
        if Rule.REGISTER_ROGUE in rules:
            for target in self.rogue_targets():
                rp = rogue_pk(world.model, target)
                cands.append(AdvMove(("1rogue", target), (Event(ADVERSARY, "RegisterRogue", (rp, target)),),
                                     reg.register_rogue(rp, target), (rp,)))
        top = max(done) if done else None
        return [c for c in cands if top is None or c.key > top]

    def lemma(self, name: str) -> Lemma:
        key = name.strip().lower().replace("_", "-")
        for k, lem in self.lemmas.items():
            if key in (k.lower(), lem.label.lower()):
                return lem
        raise UsageError(f"unknown lemma {name!r} for {self.name}; expected one of "
                         + ", ".join(self.lemmas))


def fresh(slot: Slot, label: str) -> Nonce:
    return Nonce(f"{label}.{slot.actor}.{slot.sid}")


def subsets(items, max_size: int):
    items = sorted(set(items))
    for r in range(1, min(max_size, len(items)) + 1):
        yield from itertools.combinations(items, r)


def pairs_term(pairs) -> Tup:
    return Tup(*[Tup(m, pk) for m, pk, *_ in pairs])
