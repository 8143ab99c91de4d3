"""Optimistic aggregate signatures (OAS) over the simulated group.

Signers that sign the default message M contribute only to the group element
tau; everyone else also adds a claim ``(m, {pk})``. A verifier recovers the
key of the default-message signers by dividing the claimed signers (and the
known non-contributors ``s_bot``) out of the aggregate public key.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .aggregate import encode_message
from .bls import KeyPair, Signature
from .errors import UsageError
from .pairing import Group, GroupElement, PairingContext, _to_bytes, pair, product


def _pk_key(pk: GroupElement) -> int:
    return pk.exponent


@dataclass(frozen=True)
class ClaimSet:
    """Canonical set of ``(message, signers)`` claims.

    Claims are sorted by the encoded message, signer sets by exponent, so two
    claim sets compare equal exactly when they denote the same set.
    """

    claims: tuple[tuple[bytes, tuple[GroupElement, ...]], ...] = ()

    @classmethod
    def of(cls, items: Iterable[tuple[object, Iterable[GroupElement]]] = ()) -> "ClaimSet":
        seen = {}
        for m, signers in items:
            mb = _to_bytes(m)
            if mb in seen:
                raise UsageError(f"duplicate claim for message {mb!r}")
            sset = tuple(sorted(set(signers), key=_pk_key))
            if not sset:
                raise UsageError("a claim needs at least one signer")
            seen[mb] = sset
        ordered = sorted(seen.items(), key=lambda kv: encode_message(kv[0]))
        return cls(tuple(ordered))

    def __len__(self) -> int:
        return len(self.claims)

    def __iter__(self):
        return iter(self.claims)

    def messages(self) -> list[bytes]:
        return [m for m, _ in self.claims]

    def signers(self) -> list[GroupElement]:
        return [pk for _, s in self.claims for pk in s]


EMPTY = ClaimSet()


@dataclass(frozen=True)
class OASSignature:
    tau: GroupElement
    claims: ClaimSet = EMPTY


def oas_agg_pk(pks: Sequence[GroupElement]) -> GroupElement:
    pks = list(pks)
    if not pks:
        raise UsageError("cannot aggregate an empty list of public keys")
    return product(pks, Group.G1, pks[0].ctx)


def oas_sign(ctx: PairingContext, m, M, kp: KeyPair) -> OASSignature:
    tau = ctx.hash_to_g0(m) ** kp.sk
    if _to_bytes(m) == _to_bytes(M):
        return OASSignature(tau, EMPTY)
    return OASSignature(tau, ClaimSet.of([(m, [kp.pk])]))


def claim_merge(b1: ClaimSet, b2: ClaimSet) -> ClaimSet:
    """Union of claim sets; claims on the same message pool their signers."""
    merged: dict[bytes, set] = {}
    for m, signers in list(b1) + list(b2):
        merged.setdefault(m, set()).update(signers)
    return ClaimSet.of(merged.items())


def oas_agg(s1: OASSignature, s2: OASSignature) -> OASSignature:
    overlap = set(s1.claims.signers()) & set(s2.claims.signers())
    if overlap:
        raise UsageError("aggregated OAS signatures must come from disjoint signer sets")
    return OASSignature(s1.tau * s2.tau, claim_merge(s1.claims, s2.claims))


def oas_vfy_agg(ctx: PairingContext, s_bot: Iterable[GroupElement], sig: OASSignature, M, apk: GroupElement):
    """Return the claim set if the signature verifies, else None (bottom)."""
    s_bot = list(s_bot)
    claimed = sig.claims.signers()
    if set(claimed) & set(s_bot):
        return None
    if _to_bytes(M) in sig.claims.messages():
        return None
    try:
        removed = product(s_bot + claimed, Group.G1, ctx)
        apk_m = apk / removed
        rhs = pair(ctx.hash_to_g0(M), apk_m)
        for m, signers in sig.claims:
            rhs = rhs * pair(ctx.hash_to_g0(m), product(signers, Group.G1, ctx))
        ok = pair(sig.tau, ctx.g1) == rhs
    except UsageError:
        return None
    return sig.claims if ok else None


def lift_bls_to_oas(sigma: Signature, m, M, pk: GroupElement) -> OASSignature:
    """Reinterpret a plain BLS signature as an OAS signature (no checks)."""
    if _to_bytes(m) == _to_bytes(M):
        return OASSignature(sigma, EMPTY)
    return OASSignature(sigma, ClaimSet.of([(m, [pk])]))
