"""Scripted adversary schedules for the known Token Request and SANA attacks.

A schedule is a list of selectors. Each selector picks one of the moves the
explorer offers in the current state, so every scripted step is re-checked
against the role machines, the adversary rules and the verification theory.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import UsageError
from ..explorer.engine import AdvMove, Bounds, Explorer, Move
from ..explorer.events import TraceEvent
from ..explorer.lemmas import Lemma, LemmaKind
from ..symbolic.terms import Enc, Nonce, Sign, Term, Tup
from ..symbolic.theories import ModelId
from .base import INERT, INIT_NONE, INIT_OWNER, Toggles, pk_of, sk_of
from .sana import SanaProtocol, attest_message
from .token_request import OWNER, TOKEN_BODY, TokenRequestProtocol, token

Selector = Callable  # (moves, world) -> move


def step(actor: str, pc: int, sid: int = 0, recv: Term | None = None,
         where: Callable[[Move], bool] | None = None) -> Selector:
    """Select the move of session (actor, sid) at ``pc`` that receives ``recv`` and satisfies ``where``.

    When several moves remain, the first one whose transition succeeds wins.
    """
    def pick(moves, world):
        cands = []
        for mv in moves:
            if not isinstance(mv, Move):
                continue
            slot = world.slot(mv.slot)
            if slot.actor != actor or slot.sid != sid or world.session(mv.slot).pc != pc:
                continue
            if recv is not None and mv.recv != recv:
                continue
            if where is not None and not where(mv):
                continue
            cands.append(mv)
        for mv in cands:
            if world.engine.apply(world.state, mv) is not None:
                return mv
        return None
    pick.__qualname__ = f"step({actor}#{sid}@{pc})"
    return pick


def adversary(key) -> Selector:
    def pick(moves, world):
        return next((m for m in moves if isinstance(m, AdvMove) and m.key == key), None)
    return pick


def env_is(**expected) -> Callable[[Move], bool]:
    return lambda mv: all(mv.session.get(k) == v for k, v in expected.items())


def nv(actor: str = "V", sid: int = 0) -> Nonce:
    return Nonce(f"NV.{actor}.{sid}")


def no(sid: int = 0) -> Nonce:
    return Nonce(f"NO.{OWNER}.{sid}")


def challenge(actor: str = "V", sid: int = 0) -> Nonce:
    return Nonce(f"N.{actor}.{sid}")


def signing_oracle(actor: str, x: Term, sid: int = 0, oint: str = OWNER) -> list[Selector]:
    """Run a fresh session of verifier ``actor`` so that it outputs Sign(x, sk_actor)."""
    return [step(actor, 0, sid, where=env_is(oint=oint)), step(actor, 1, sid, recv=x)]


def owner_reply(x: str, apk: Term, nonce: Term, issuer: str = OWNER, target: str = "V") -> Tup:
    """The final Token Request message as the verifier receives it, possibly re-encrypted."""
    return Tup(Enc(token(issuer), pk_of(target)), apk, Sign(Tup(nonce, apk), sk_of(x)), pk_of(x))


@dataclass(frozen=True)
class ScriptedAttack:
    name: str
    summary: str
    build: Callable[[], object]
    model: ModelId
    lemma: str | None
    schedule: Callable[[object], list]

    def explorer(self, instance=None) -> Explorer:
        inst = instance if instance is not None else self.build()
        lemma = inst.lemma(self.lemma) if self.lemma else _NO_LEMMA
        # the script picks its own steps, so nothing is pruned
        return Explorer(inst, self.model, lemma, Bounds(max_sessions_per_role=3), reduce=False)

    def run(self, instance=None) -> tuple[list, bool]:
        """Replay the schedule; raises UsageError if some step is not possible in this setting."""
        ex = self.explorer(instance)
        trace, violated = ex.replay(self.schedule(ex.instance))
        return [TraceEvent(i, e) for i, e in enumerate(trace)], violated


# the signing oracle has no lemma of its own; no role claims this one
_NO_LEMMA = Lemma(LemmaKind.Aliveness, claimant_role="-", name="none")


def _tr(init: str, multi_owner: bool = True, helpers=(("V2", 2),)):
    return lambda: TokenRequestProtocol(Toggles(init=init, multi_owner=multi_owner), helpers=helpers)


def _sana(toggles: Toggles, helpers=(("V2", 2), ("V3", 1))):
    return lambda: SanaProtocol(toggles, provers=2, helpers=helpers)


def _signing_oracle(inst):
    return signing_oracle("V", TOKEN_BODY)


def _aliveness_verifier(inst):
    apk = Tup(pk_of("V2"))
    return ([step("V", 0, where=env_is(oint=OWNER)), step("V", 1, recv=INERT)]
            + signing_oracle("V2", TOKEN_BODY, sid=0)
            + signing_oracle("V2", Tup(nv(), apk), sid=1)
            + [step("V", 2, recv=owner_reply("V2", apk, nv(), issuer="V2"))])


def _weak_agreement_verifier(inst):
    apk = inst.owner_apk(None)
    return [step("V", 0, where=env_is(oint=OWNER)),
            step(OWNER, 0, recv=nv()),
            step("V", 1, recv=INERT),
            step(OWNER, 1, recv=Tup(Sign(no(), sk_of("E")), pk_of("E"))),
            # the token was encrypted for E; the adversary opens it and re-encrypts it for V
            step("V", 2, recv=owner_reply(OWNER, apk, nv()))]


def _weak_agreement_owner(inst):
    return [step("V", 0, where=env_is(oint="E")),
            step(OWNER, 0, recv=INERT),
            step("V", 1, recv=no()),
            step(OWNER, 1, recv=Tup(Sign(no(), sk_of("V")), pk_of("V")))]


def _forge_noinit(inst):
    apk = Tup(pk_of("V3"))
    m = attest_message(challenge())
    return ([step("V", 0), step("V", 1, recv=INERT)]
            + signing_oracle("V2", TOKEN_BODY, sid=0)
            + signing_oracle("V2", Tup(nv(), apk), sid=1)
            + [step("V", 2, recv=owner_reply("V2", apk, nv(), issuer="V2"))]
            + signing_oracle("V3", m)
            + [step("V", 3)])


def _forge_rogue(inst):
    return [adversary(("1rogue", pk_of("P1"))),
            step("V", 0),
            step(OWNER, 0, recv=nv()),
            step("V", 1, recv=no()),
            step(OWNER, 1, recv=Tup(Sign(no(), sk_of("V")), pk_of("V"))),
            # the owner's apk now lists the rogue key next to both provers
            step("V", 2, where=lambda mv: len(mv.session.get("apk").items) == 3),
            step("P2", 0, recv=Tup(challenge(), token(OWNER))),
            step("V", 3)]


ATTACKS = {a.name: a for a in (
    ScriptedAttack("signing-oracle", "a verifier session signs whatever nonce it is handed",
                   _tr(INIT_NONE), ModelId.A4_Plain, None, _signing_oracle),
    ScriptedAttack("aliveness-verifier", "verifier accepts a token issued by a helper verifier "
                   "(no verifier initialisation)", _tr(INIT_NONE), ModelId.A4_Plain,
                   "aliveness-verifier", _aliveness_verifier),
    ScriptedAttack("weak-agreement-verifier", "the owner's token for E is re-encrypted for V",
                   _tr(INIT_OWNER), ModelId.A4_Plain, "weak-agreement-verifier", _weak_agreement_verifier),
    ScriptedAttack("weak-agreement-owner", "V talks to owner E while O believes it talks to V",
                   _tr(INIT_OWNER), ModelId.A4_Plain, "weak-agreement-owner", _weak_agreement_owner),
    ScriptedAttack("sana-forge-noinit", "attestation from a helper verifier's key accepted as a prover's",
                   _sana(Toggles(init=INIT_NONE, multi_owner=False)), ModelId.A4_Plain,
                   "attestation-agreement", _forge_noinit),
    ScriptedAttack("sana-forge-rogue", "a rogue key registered against P1 forges P1's attestation",
                   _sana(Toggles(init=INIT_OWNER, multi_owner=False, dishonest_keys_in_apk=True)),
                   ModelId.A6_RogueKey, "attestation-agreement", _forge_rogue),
)}

_ALIASES = {
    "signingoracle": "signing-oracle",
    "alivenessverifier": "aliveness-verifier",
    "weakagreementverifier": "weak-agreement-verifier",
    "weakagreementowner": "weak-agreement-owner",
    "attestationforgenoinit": "sana-forge-noinit",
    "attestationforgerogue": "sana-forge-rogue",
}


def scripted_attack(name: str, model: ModelId | None = None) -> ScriptedAttack:
    """Look up a scripted attack by name; ``model`` re-targets it at another aggregate model."""
    key = name.strip().lower()
    key = _ALIASES.get(key.replace("-", "").replace("_", ""), key)
    if key not in ATTACKS:
        raise UsageError(f"unknown attack {name!r}; expected one of {', '.join(ATTACKS)}")
    a = ATTACKS[key]
    if model is not None and model != a.model:
        a = ScriptedAttack(a.name, a.summary, a.build, model, a.lemma, a.schedule)
    return a
