"""Naive BLS aggregation, its fast same-message check, three rogue-key
mitigations, and constructors for the rogue-key and splitting-zero attacks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from . import _kernels
from .bls import KeyPair, Signature, as_rng, keypair_from_sk
from .errors import UsageError
from .pairing import Group, GroupElement, PairingContext, pair, product, _to_bytes

AggregateSignature = GroupElement


def encode_message(m) -> bytes:
    """Canonical length-prefixed encoding used for message equality."""
    data = _to_bytes(m)
    return len(data).to_bytes(8, "big") + data


def encode_augmented(pk: GroupElement, m) -> bytes:
    pkb = pk.to_bytes()
    return len(pkb).to_bytes(8, "big") + pkb + encode_message(m)


def agg(sigs: Sequence[Signature]) -> AggregateSignature:
    sigs = list(sigs)
    if not sigs:
        raise UsageError("cannot aggregate an empty sequence of signatures")
    return product(sigs, Group.G0, sigs[0].ctx)


def vfy_agg_hashed(ctx: PairingContext, sa: AggregateSignature,
                   hashes: Sequence[GroupElement], pks: Sequence[GroupElement]) -> bool:
    """Aggregate equation with the hash points given directly.

    ``e(sa, g1) == prod_i e(h_i, pk_i)``. Lets exhaustive tests range over
    every point of G0, including ones no message hashes to.
    """
    if len(hashes) != len(pks) or not hashes:
        return False
    try:
        rhs = product((pair(h, pk) for h, pk in zip(hashes, pks)), Group.GT, ctx)
        return pair(sa, ctx.g1) == rhs
    except UsageError:
        return False


def vfy_agg_naive(ctx: PairingContext, sa: AggregateSignature, msgs: Sequence, pks: Sequence[GroupElement]) -> bool:
    if len(msgs) != len(pks) or not msgs:
        return False
    return vfy_agg_hashed(ctx, sa, [ctx.hash_to_g0(m) for m in msgs], pks)


def vfy_agg_same_message(ctx: PairingContext, sa: AggregateSignature, m, apk: GroupElement) -> bool:
    """Two-pairing check for the case where every signer signed ``m``."""
    try:
        return pair(sa, ctx.g1) == pair(ctx.hash_to_g0(m), apk)
    except UsageError:
        return False


def vfy_agg_distinct(ctx: PairingContext, sa: AggregateSignature, msgs: Sequence, pks: Sequence[GroupElement]) -> bool:
    # Duplicates are rejected outright, even honest ones.
    encoded = [encode_message(m) for m in msgs]
    if len(set(encoded)) != len(encoded):
        return False
    return vfy_agg_naive(ctx, sa, msgs, pks)


def sign_augmented(ctx: PairingContext, m, kp: KeyPair) -> Signature:
    return ctx.hash_to_g0(encode_augmented(kp.pk, m)) ** kp.sk


def vfy_agg_augmented(ctx: PairingContext, sa: AggregateSignature, msgs: Sequence, pks: Sequence[GroupElement]) -> bool:
    if len(msgs) != len(pks) or not msgs:
        return False
    hashes = [ctx.hash_to_g0(encode_augmented(pk, m)) for m, pk in zip(msgs, pks)]
    return vfy_agg_hashed(ctx, sa, hashes, pks)


@dataclass(frozen=True)
class PopKey:
    u: GroupElement
    pi: GroupElement


def pop_for(ctx: PairingContext, sk: int) -> PopKey:
    """Proof of possession for a known secret key (honest or adversarial)."""
    u = ctx.element(Group.G1, sk)
    return PopKey(u, ctx.hash_prime_to_g0(u.to_bytes()) ** sk)


def gen_pop(ctx: PairingContext, randomness=None) -> tuple[int, PopKey]:
    rng = as_rng(randomness)
    sk = rng.randrange(1, ctx.q)
    return sk, pop_for(ctx, sk)


def vfy_pop(ctx: PairingContext, k: PopKey) -> bool:
    try:
        return pair(k.pi, ctx.g1) == pair(ctx.hash_prime_to_g0(k.u.to_bytes()), k.u)
    except UsageError:
        return False


def vfy_agg_pop(ctx: PairingContext, sa: AggregateSignature, msgs: Sequence, pop_keys: Sequence[PopKey]) -> bool:
    if not all(vfy_pop(ctx, k) for k in pop_keys):
        return False
    return vfy_agg_naive(ctx, sa, msgs, [k.u for k in pop_keys])


def rogue_key_forge(ctx: PairingContext, pk_target: GroupElement, m, randomness=None,
                    alpha: int | None = None) -> tuple[GroupElement, AggregateSignature]:
    """Forge an aggregate on ``(m, m)`` under ``(pk_target, pk_rogue)``.

    Only public data and the attacker's own ``alpha`` are used:
    ``pk_rogue = g1^alpha / pk_target`` and ``sigma = H(m)^alpha``.
    """
    if alpha is None:
        alpha = as_rng(randomness).randrange(1, ctx.q)
    pk_rogue = ctx.g1 ** alpha / pk_target
    return pk_rogue, ctx.hash_to_g0(m) ** alpha


def splitting_zero_keys(ctx: PairingContext, randomness=None) -> tuple[int, int]:
    sk1 = as_rng(randomness).randrange(1, ctx.q)
    return sk1, (-sk1) % ctx.q


def splitting_zero_keypairs(ctx: PairingContext, randomness=None) -> tuple[KeyPair, KeyPair]:
    sk1, sk2 = splitting_zero_keys(ctx, randomness)
    return keypair_from_sk(ctx, sk1), keypair_from_sk(ctx, sk2)


# Batched exponent-level checks (see _kernels for the backends) ---------------

def batch_vfy_agg_exponents(q: int, sigma, hashes, pks) -> np.ndarray:
    """Vectorised naive verification on raw exponents.

    ``sigma`` has shape (n,), ``hashes`` and ``pks`` shape (n, k). Row i passes
    iff ``sigma[i] == sum_j hashes[i, j] * pks[i, j] mod q``.
    """
    return _kernels.pairing_rows_equal(sigma, hashes, pks, q)


def batch_rogue_forgeries(q: int, sk_target, alpha, h) -> np.ndarray:
    """Exponent-level rogue forgeries for many triples; returns naive-check results."""
    sk_target = np.asarray(sk_target, dtype=np.uint64) % np.uint64(q)
    alpha = np.asarray(alpha, dtype=np.uint64) % np.uint64(q)
    h = np.asarray(h, dtype=np.uint64) % np.uint64(q)
    pk_rogue = (alpha + (np.uint64(q) - sk_target)) % np.uint64(q)
    sigma = _kernels.mulmod(h, alpha, q)
    hashes = np.stack([h, h], axis=1)
    pks = np.stack([sk_target, pk_rogue], axis=1)
    return batch_vfy_agg_exponents(q, sigma, hashes, pks)


# Algebraic view of what an attacker can build -------------------------------
#
# In the simulated group every exponent is visible, so "what can the attacker
# compute" has to be asked in the algebraic model: hash points are independent
# generators with unknown relations, secrets are indeterminates. A G0 element
# is a linear form over monomials such as ("H'", u) or ("H", m, "sk_t"); the
# attacker can reach exactly the Z_q-span of the forms it holds.

FormalExponent = Mapping[tuple, int]


def rogue_pop_target(u_label, alpha: int) -> dict:
    """Formal exponent a valid PoP for ``u = g1^alpha / pk_t`` must have."""
    return {("H'", u_label): alpha, ("H'", u_label, "sk_t"): -1}


def _basis(known: Sequence[FormalExponent], target: FormalExponent) -> list:
    keys = set(target)
    for v in known:
        keys.update(v)
    return sorted(keys, key=repr)


def formal_span_contains(q: int, known: Sequence[FormalExponent], target: FormalExponent) -> bool:
    """Is ``target`` in the Z_q-span of ``known``? Decides all q^k combinations at once."""
    basis = _basis(known, target)
    dom = GF(q)
    rows = [[v.get(b, 0) % q for b in basis] for v in known]
    t = [target.get(b, 0) % q for b in basis]
    if not rows:
        return all(x == 0 for x in t)
    base = DomainMatrix([[dom(x) for x in r] for r in rows], (len(rows), len(basis)), dom)
    ext = DomainMatrix([[dom(x) for x in r] for r in rows + [t]], (len(rows) + 1, len(basis)), dom)
    return base.rank() == ext.rank()


def enumerate_formal_combinations(q: int, known: Sequence[FormalExponent], target: FormalExponent) -> int:
    """Brute-force count of coefficient vectors in Z_q^k whose combination equals ``target``.

    Intended for k <= 3 at q = 101 (about a million combinations).
    """
    basis = _basis(known, target)
    k = len(known)
    mat = np.array([[v.get(b, 0) % q for b in basis] for v in known], dtype=np.int64).reshape(k, len(basis))
    t = np.array([target.get(b, 0) % q for b in basis], dtype=np.int64)
    grids = np.meshgrid(*[np.arange(q, dtype=np.int64)] * k, indexing="ij")
    coeffs = np.stack([g.ravel() for g in grids], axis=1)
    combos = (coeffs @ mat) % q
    return int(np.all(combos == t, axis=1).sum())
