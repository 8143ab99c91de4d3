"""Toy aggregation protocol: two signers, an aggregator and a verifier.

Each signer signs a fresh nonce and publishes it. The aggregator combines any
signatures it has seen. The verifier accepts an aggregate with a list of
(message, key) claims and, if verification succeeds, commits to every claim.
"""
from __future__ import annotations

from ..explorer.engine import Move
from ..explorer.events import NO_PARTNER, commit, running, sign_evt
from ..explorer.lemmas import Lemma, LemmaKind
from ..symbolic.terms import AGG_TYPES, Name, Pk, Sign, Tup
from ..symbolic.theories import aggregate_signatures
from .base import ProtocolInstance, Role, RoleSpec, Toggles, fresh, pairs_term, sk_of, subsets

PUBLIC_MSG = Name("c")


class Signer(Role):
    kind = "Signer"

    def moves(self, sess, world):
        if sess.pc != 0:
            return []
        slot = world.slot(sess.slot)
        sk = sk_of(slot.actor)
        m = fresh(slot, "m")
        out = Tup(m, Sign(m, sk), Pk(sk))
        evs = (sign_evt(slot.actor, m, Pk(sk)), running(slot.actor, NO_PARTNER, m))
        return [Move(sess.slot, sess.finish(), evs, (out,))]


class Aggregator(Role):
    kind = "Aggregator"

    def moves(self, sess, world):
        if sess.pc != 0:
            return []
        sigs = [t for t in world.knowledge if isinstance(t, Sign)]
        out = []
        for c in subsets(sigs, world.bounds.max_agg_size):
            try:
                agg = aggregate_signatures(world.model, c)
            except Exception:
                continue
            out.append(Move(sess.slot, sess.finish(), (), (agg,), recv=Tup(*c)))
        return out


class Verifier(Role):
    kind = "Verifier"

    def moves(self, sess, world):
        if sess.pc != 0:
            return []
        actor = world.slot(sess.slot).actor
        out = []
        for agg in world.aggregates:
            for pairs in world.plausible_pairs(agg):
                if not all(world.registry.registered(pk) for _, pk, _ in pairs):
                    continue
                evs = tuple(commit(actor, self.p.owner_of(pk), m) for m, pk, _ in pairs)
                out.append(Move(sess.slot, sess.finish(), evs, (),
                                recv=Tup(agg, pairs_term(pairs)), vfy=(agg, pairs)))
        return out


class ToyProtocol(ProtocolInstance):
    name = "toy"
    lemmas = {
        "MA": Lemma(LemmaKind.MessageAuthenticity, name="MA"),
        "WA": Lemma(LemmaKind.WeakAgreement, claimant_role="Verifier", name="WA"),
        "NSZ": Lemma(LemmaKind.NoSplittingZero, name="NSZ"),
        "NRK": Lemma(LemmaKind.NoRogueKey, name="NRK"),
    }

    def __init__(self, toggles: Toggles = Toggles(), verifier_sessions: int = 2):
        specs = [RoleSpec("Signer", "S1"), RoleSpec("Signer", "S2"), RoleSpec("Aggregator", "A"),
                 RoleSpec("Verifier", "V", verifier_sessions)]
        roles = {c.kind: c(self) for c in (Signer, Aggregator, Verifier)}
        super().__init__(specs, roles, honest=["S1", "S2", "A", "V"], public=[PUBLIC_MSG], toggles=toggles)
        # only signers hold signing keys that matter
        self.honest_pks = frozenset(Pk(sk_of(x)) for x in ("S1", "S2"))
        self.honest_identities = frozenset({"S1", "S2", "A", "V"})

    def message_vocab(self, world):
        return [t for t in world.knowledge.atoms() if not self.is_secret_key(t)]
