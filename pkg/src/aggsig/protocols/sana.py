"""SANA: Token Request followed by the aggregate attestation round.

The verifier sends the challenge <N, T>. Provers check the token against the
owner key they were provisioned with and sign M = <h_good, N, c>. Responses
are aggregated (by the aggregator role or by the adversary) and the verifier
checks the aggregate against the apk it received from the owner.
"""
from __future__ import annotations

import itertools

from ..explorer.engine import Move
from ..explorer.events import WILDCARD, commit, running, sign_evt
from ..explorer.lemmas import Lemma, LemmaKind
from ..symbolic.terms import Name, Pk, Sign, Tup
from ..symbolic.theories import (Rule, aggregate_signatures, agg_size, canonical_pairs,
                                 targeted_aggregates)
from ..symbolic.terms import AGG_TYPES, IndexedAgg
from .base import RoleSpec, Role, Toggles, pk_of, sk_of
from .token_request import COUNTER, OWNER, TokenRequestProtocol, _choices, token

H_GOOD = Name("h_good")
ATTEST = "attest"


def attest_message(n) -> Tup:
    return Tup(H_GOOD, n, COUNTER)


def _nonces(world, wanted):
    """Challenge nonces worth answering: those some verifier waits on, plus the inert stand-in."""
    ns = [p.items[1] for p in wanted if isinstance(p, Tup) and len(p.items) == 3 and p.items[0] == H_GOOD]
    return _choices(world, ns)


class Prover(Role):
    kind = "Prover"

    def moves(self, sess, world):
        if sess.pc != 0:
            return []
        me = world.slot(sess.slot).actor
        tok = token(OWNER)
        if not world.derivable(tok):
            return []
        out = []
        for n in _nonces(world, world.wanted_from(me)):
            m = attest_message(n)
            evs = (commit(me, OWNER, tok, "token"), running(me, WILDCARD, m, ATTEST), sign_evt(me, m, pk_of(me)))
            out.append(Move(sess.slot, sess.finish(), evs, (Sign(m, sk_of(me)),), recv=Tup(n, tok)))
        return out


class Aggregator(Role):
    """Validates the challenge token and combines every prover response it can see for that nonce."""

    kind = "Aggregator"

    def moves(self, sess, world):
        tok = token(OWNER)
        if sess.pc == 0:
            if not world.derivable(tok):
                return []
            wanted = [p for x in self.p.provers for p in world.wanted_from(x)]
            return [Move(sess.slot, sess.step(1, n=n), (), (), recv=Tup(n, tok)) for n in _nonces(world, wanted)]
        if sess.pc == 1:
            m = attest_message(sess.get("n"))
            sigs = [Sign(m, sk_of(p)) for p in self.p.provers if Sign(m, sk_of(p)) in world.knowledge]
            if not sigs:
                return []
            sigs = sigs[:world.bounds.max_agg_size]
            agg = aggregate_signatures(world.model, sigs)
            return [Move(sess.slot, sess.finish(), (), (agg,), recv=Tup(*sigs))]
        return []


class SanaProtocol(TokenRequestProtocol):
    name = "sana"
    attest = True
    lemmas = {
        "attestation-agreement": Lemma(LemmaKind.NonInjectiveAgreement, "Verifier", ATTEST,
                                       "attestation-agreement"),
        "token-agreement": Lemma(LemmaKind.NonInjectiveAgreement, "Prover", "token", "token-agreement"),
    }

    def __init__(self, toggles: Toggles = Toggles(multi_owner=False), provers: int = 2,
                 helpers: tuple = (("V2", 2), ("V3", 1)), aggregator: bool = True):
        if provers not in (2, 3):
            raise ValueError("SANA scenarios use two or three provers")
        names = tuple(f"P{i + 1}" for i in range(provers))
        specs = [RoleSpec("Prover", p) for p in names]
        extra = [Prover]
        if aggregator:
            specs.append(RoleSpec("Aggregator", "G"))
            extra.append(Aggregator)
        super().__init__(toggles, helpers=helpers, extra_specs=tuple(specs), extra_roles=tuple(extra),
                         provers=names)
        self.honest_identities = self.honest_identities | {"G"}
        self.public = self.public + (H_GOOD,)

    def adversary_rules(self, model):
        rules = super().adversary_rules(model)
        if not self.toggles.rogue_registration:
            rules = rules - {Rule.REGISTER_ROGUE, Rule.ROGUE_AGGREGATE, Rule.ROGUE_EXTEND}
        return rules

    def rogue_targets(self):
        return sorted(pk_of(p) for p in self.provers)

    def owner_apk(self, world):
        keys = [pk_of(p) for p in self.provers]
        if self.toggles.dishonest_keys_in_apk:
            reg = world.registry
            keys += sorted(reg.dishonest - {pk_of(x) for x in self.compromised})
        return Tup(*keys)

    def attest_message(self, n):
        return attest_message(n)

    def attest_moves(self, sess, world, me):
        apk = sess.get("apk")
        m = attest_message(sess.get("n"))
        want = [(m, pk) for pk in apk.items]
        out = []
        evs = tuple(commit(me, self.owner_of(pk), m, ATTEST) for pk in apk.items)
        cands = set(targeted_aggregates(world.model, world.registry, want, world.derivable,
                                        world.bounds.max_agg_size))
        cands.update(t for t in world.knowledge if isinstance(t, AGG_TYPES) and agg_size(t) == len(want))
        for agg in sorted(cands):
            for pairs in _alignments(agg, want):
                out.append(Move(sess.slot, sess.finish(), evs, (), recv=agg, vfy=(agg, pairs)))
        return out


def _alignments(agg, want):
    """Index assignments of the verifier's (message, key) list onto the aggregate's positions."""
    n = len(want)
    if isinstance(agg, IndexedAgg):
        idx = [i for _, i in agg.entries]
        seen = set()
        for perm in itertools.permutations(want):
            p = canonical_pairs((m, pk, i) for (m, pk), i in zip(perm, idx))
            if p not in seen:
                seen.add(p)
                yield p
    else:
        yield tuple((m, pk, i + 1) for i, (m, pk) in enumerate(want))
