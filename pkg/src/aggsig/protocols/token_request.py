"""Token Request: a verifier obtains an encrypted authorization token from the network owner.

Messages, with the PKI modelled as a public identity-to-key map (so a
certificate is just the certified public key):

    V -> O : N_V
    O -> V : N_O
    V -> O : sign(N_O, sk_V), pk_V
    O -> V : enc(T, pk_X), apk, sign(<N_V, apk>, sk_O), pk_O

where X is the identity on the certificate the owner received and
T = <Hs, c, t, sign(<Hs, c, t>, sk_O)>. The token fields are public constants.
"""
from __future__ import annotations

from ..explorer.engine import Move
from ..explorer.events import WILDCARD, commit, running
from ..explorer.lemmas import Lemma, LemmaKind
from ..symbolic.terms import Enc, Name, Pk, RoguePk, Sign, Term, Tup
from .base import (ADVERSARY, INERT, INIT_OWNER, ProtocolInstance, Role, RoleSpec, Toggles, fresh, pk_of,
                   sk_of)

HS = Name("Hs")
COUNTER = Name("c")
EXPIRY = Name("t")
TOKEN_BODY = Tup(HS, COUNTER, EXPIRY)

OWNER = "O"
TARGET = "V"
TR_TAG = "tr"


def token(issuer: str) -> Tup:
    """Token as the verifier reconstructs it when it believes ``issuer`` signed it."""
    return Tup(HS, COUNTER, EXPIRY, Sign(TOKEN_BODY, sk_of(issuer)))


def is_apk(t: Term) -> bool:
    return isinstance(t, Tup) and len(t.items) > 0 and all(isinstance(x, (Pk, RoguePk)) for x in t.items)


class Verifier(Role):
    kind = "Verifier"

    def _certified(self, sess):
        if self.p.toggles.init == INIT_OWNER:
            return [sess.get("oint")]
        return self.p.certified

    def moves(self, sess, world):
        slot = world.slot(sess.slot)
        me = slot.actor
        if sess.pc == 0:
            nv = fresh(slot, "NV")
            return [Move(sess.slot, sess.step(1, oint=o, nv=nv), (), (nv,)) for o in self.p.owner_candidates]
        if sess.pc == 1:
            out = []
            for x in _choices(world, world.wanted_from(me)):
                msg = Tup(Sign(x, sk_of(me)), pk_of(me))
                out.append(Move(sess.slot, sess.step(2), (running(me, sess.get("oint"), None, TR_TAG),),
                                (msg,), recv=x))
            return out
        if sess.pc == 2:
            return self._accept(sess, world, me)
        if sess.pc == 3:
            return self.p.attest_moves(sess, world, me)
        return []

    def _accept(self, sess, world, me):
        out = []
        nv, oint = sess.get("nv"), sess.get("oint")
        enc_targets = {}
        for x in self._certified(sess):
            tok = token(x)
            enc = Enc(tok, pk_of(me))
            if not world.derivable(enc):
                continue
            for apk in self.p.apk_candidates(world):
                sig = Sign(Tup(nv, apk), sk_of(x))
                if not world.derivable(sig):
                    continue
                recv = Tup(enc, apk, sig, pk_of(x))
                evs = (commit(me, oint, None, TR_TAG),)
                if self.p.attest:
                    n = fresh(world.slot(sess.slot), "N")
                    nxt = sess.step(3, drop=("nv", "oint"), apk=apk, n=n)
                    out.append(Move(sess.slot, nxt, evs, (Tup(n, tok),), recv=recv))
                else:
                    out.append(Move(sess.slot, sess.finish(), evs, (), recv=recv))
        return out

    def wanted(self, sess, world):
        if sess.pc in (1, 2):
            nv = sess.get("nv")
            who = sess.get("oint") if self.p.toggles.init == INIT_OWNER else None
            return [(TOKEN_BODY, who)] + [(Tup(nv, apk), who) for apk in self.p.apk_candidates(world)]
        if sess.pc == 3:
            m = self.p.attest_message(sess.get("n"))
            return [(m, self.p.owner_of(pk)) for pk in sess.get("apk").items]
        return []


class Owner(Role):
    kind = "Owner"

    def moves(self, sess, world):
        slot = world.slot(sess.slot)
        me = slot.actor
        if sess.pc == 0:
            no = fresh(slot, "NO")
            apk = self.p.owner_apk(world)
            echo = [p.items[0] for p in world.wanted_from(me)
                    if isinstance(p, Tup) and len(p.items) == 2 and p.items[1] == apk]
            return [Move(sess.slot, sess.step(1, nv=x, no=no), (), (no,), recv=x) for x in _choices(world, echo)]
        if sess.pc == 1:
            out = []
            nv, no = sess.get("nv"), sess.get("no")
            apk = self.p.owner_apk(world)
            tok = token(me)
            for x in self.p.certified:
                if x == me:
                    continue
                sig = Sign(no, sk_of(x))
                if not world.derivable(sig):
                    continue
                evs = [running(me, x, None, TR_TAG), commit(me, x, None, TR_TAG)]
                if self.p.attest:
                    evs.append(running(me, WILDCARD, tok, "token"))
                msg = Tup(Enc(tok, pk_of(x)), apk, Sign(Tup(nv, apk), sk_of(me)), pk_of(me))
                out.append(Move(sess.slot, sess.finish(), tuple(evs), (msg,), recv=Tup(sig, pk_of(x))))
            return out
        return []

    def wanted(self, sess, world):
        if sess.pc == 1:
            return [(sess.get("no"), None)]
        return []


def _choices(world, terms) -> list[Term]:
    """Values for a receive slot that accepts any term: useful ones plus one inert stand-in."""
    return sorted({t for t in terms if world.derivable(t)} | {INERT})


class TokenRequestProtocol(ProtocolInstance):
    """Verifier V, owner O, helper verifiers V2/V3 and the compromised identity E."""

    name = "token-request"
    attest = False
    lemmas = {
        "aliveness-owner": Lemma(LemmaKind.Aliveness, "Owner", TR_TAG, "aliveness-owner"),
        "aliveness-verifier": Lemma(LemmaKind.Aliveness, "Verifier", TR_TAG, "aliveness-verifier"),
        "weak-agreement-owner": Lemma(LemmaKind.WeakAgreement, "Owner", TR_TAG, "weak-agreement-owner"),
        "weak-agreement-verifier": Lemma(LemmaKind.WeakAgreement, "Verifier", TR_TAG, "weak-agreement-verifier"),
    }

    def __init__(self, toggles: Toggles = Toggles(), helpers: tuple = (("V2", 2), ("V3", 1)),
                 owner_sessions: int = 1, target_sessions: int = 1, extra_specs: tuple = (),
                 extra_roles: tuple = (), provers: tuple = ()):
        specs = [RoleSpec("Verifier", TARGET, target_sessions)]
        specs += [RoleSpec("Verifier", h, n) for h, n in helpers]
        specs += [RoleSpec("Owner", OWNER, owner_sessions)]
        specs += list(extra_specs)
        roles = {"Verifier": Verifier(self), "Owner": Owner(self)}
        for r in extra_roles:
            roles[r.kind] = r(self)
        honest = [TARGET, OWNER] + [h for h, _ in helpers] + list(provers)
        public = [HS, COUNTER, EXPIRY, INERT]
        super().__init__(specs, roles, honest=honest, compromised=[ADVERSARY], public=public, toggles=toggles)
        self.provers = tuple(provers)
        # identities holding a PKI certificate
        self.certified = [TARGET, OWNER] + [h for h, _ in helpers] + [ADVERSARY]
        self.owner_candidates = [OWNER, ADVERSARY] if toggles.multi_owner else [OWNER]

    def owner_apk(self, world) -> Tup:
        return Tup(*[pk_of(p) for p in self.provers]) if self.provers else Tup(pk_of("P1"), pk_of("P2"))

    def apk_candidates(self, world) -> list[Tup]:
        hit = world.memo.get("apk")
        if hit is not None:
            return hit
        known = {t for t in world.knowledge if is_apk(t)}
        known.update(Tup(pk_of(x)) for x in self.certified)
        known.add(self.owner_apk(world))
        world.memo["apk"] = out = sorted(known)
        return out

    def attest_moves(self, sess, world, me):
        return []

    def attest_message(self, n):
        return None
