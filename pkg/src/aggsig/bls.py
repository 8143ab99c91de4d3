"""Single-signer BLS over the simulated group: sk in Z_q, pk = g1^sk, sigma = H(m)^sk."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .pairing import Group, GroupElement, PairingContext, pair

# An aggregate is deliberately the same type as a single signature.
Signature = GroupElement


@dataclass(frozen=True)
class KeyPair:
    sk: int
    pk: GroupElement


def as_rng(randomness) -> random.Random:
    """Accept a seed, an existing ``random.Random`` or None (OS entropy)."""
    if isinstance(randomness, random.Random):
        return randomness
    if randomness is None:
        return random.Random(random.SystemRandom().getrandbits(64))
    return random.Random(randomness)


def keypair_from_sk(ctx: PairingContext, sk: int) -> KeyPair:
    """Build a key pair from any scalar, including adversarial ones like 0."""
    return KeyPair(sk % ctx.q, ctx.element(Group.G1, sk))


def gen(ctx: PairingContext, randomness=None) -> KeyPair:
    rng = as_rng(randomness)
    sk = rng.randrange(1, ctx.q)
    return keypair_from_sk(ctx, sk)


def sign(ctx: PairingContext, m, sk: int) -> Signature:
    return ctx.hash_to_g0(m) ** sk


def vfy(ctx: PairingContext, sigma: Signature, m, pk: GroupElement, identity_check: bool = True) -> bool:
    """Check ``e(H(m), pk) == e(sigma, g1)``; reject the identity key when asked to."""
    try:
        if sigma.group is not Group.G0 or pk.group is not Group.G1:
            return False
        if identity_check and pk.is_identity:
            return False
        return pair(ctx.hash_to_g0(m), pk) == pair(sigma, ctx.g1)
    except (AttributeError, ValueError):
        return False
