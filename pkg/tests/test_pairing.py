import random

import pytest

from aggsig.errors import UsageError
from aggsig.pairing import (TAG_H, Group, PairingContext, Q_UNIT, exp, inv, mul, pair,
                            sha256_hasher)
from conftest import stub_ctx


def test_pair_bilinearity_examples(ctx101):
    g0, g1 = ctx101.g0, ctx101.g1
    assert pair(g0 ** 2, g1 ** 3) == ctx101.gT ** 6
    assert pair(g0 ** 50, g1 ** 3).exponent == 49
    for x in range(101):
        assert pair(g0 ** 0, g1 ** x).is_identity


def test_group_law_examples(ctx101):
    g0, g1 = ctx101.g0, ctx101.g1
    assert mul(g1 ** 7, g1 ** 13) == g1 ** 20
    assert inv(g1 ** 7).exponent == 94
    assert exp(g0 ** 5, 7) == g0 ** 35


def test_tag_mismatch_is_usage_error(ctx101):
    with pytest.raises(UsageError):
        mul(ctx101.g0, ctx101.g1)
    with pytest.raises(UsageError):
        pair(ctx101.g1, ctx101.g0)
    with pytest.raises(UsageError):
        pair(ctx101.g0, ctx101.g0)


def test_mixed_contexts_rejected(ctx101):
    other = PairingContext(103)
    with pytest.raises(UsageError):
        mul(ctx101.g0, other.g0)


def test_context_requires_prime():
    with pytest.raises(UsageError):
        PairingContext(100)
    with pytest.raises(UsageError):
        PairingContext(2 ** 64 + 13)


def test_bilinearity_randomized(ctx_large):
    rng = random.Random(7)
    q = ctx_large.q
    for _ in range(200):
        a, b, al, be = (rng.randrange(q) for _ in range(4))
        lhs = pair(ctx_large.g0 ** (al * a), ctx_large.g1 ** (be * b))
        assert lhs.exponent == (al * a * be * b) % q


def test_pairing_homomorphism(ctx101):
    g1 = ctx101.g1
    for x in range(0, 101, 7):
        for y in range(0, 101, 11):
            X, Y = ctx101.g0 ** x, ctx101.g0 ** y
            assert pair(X, g1) * pair(Y, g1) == pair(X * Y, g1)


def test_hash_deterministic_and_stubbable(ctx101):
    assert ctx101.hash_to_g0(b"m") == ctx101.hash_to_g0(b"m")
    ctx = stub_ctx({b"m1": 5})
    assert ctx.hash_to_g0("m1") == ctx.g0 ** 5


def test_hash_domain_separation(ctx_large):
    assert ctx_large.hash_to_g0(b"x") != ctx_large.hash_prime_to_g0(b"x")


def test_hash_rehashes_zero_digest():
    # Search for a message whose counter-0 digest is 0 mod 101.
    msg = next(m for m in (f"z{i}".encode() for i in range(100000))
               if sha256_hasher(TAG_H, m, 0) % Q_UNIT == 0)
    ctx = PairingContext(Q_UNIT)
    h = ctx.hash_to_g0(msg)
    assert h.exponent != 0
    c1 = sha256_hasher(TAG_H, msg, 1) % Q_UNIT
    if c1:
        assert h.exponent == c1


def test_hash_never_identity(ctx101):
    for i in range(3000):
        assert not ctx101.hash_to_g0(f"msg-{i}".encode()).is_identity
        assert not ctx101.hash_prime_to_g0(f"msg-{i}".encode()).is_identity


def test_hash_stub_zero_falls_back_to_counter():
    ctx = stub_ctx({b"m": 101})
    h = ctx.hash_to_g0(b"m")
    assert h.exponent != 0
    c1 = sha256_hasher(TAG_H, b"m", 1) % 101
    if c1:
        assert h.exponent == c1


def test_group_tags():
    ctx = PairingContext(Q_UNIT)
    assert ctx.g0.group is Group.G0 and ctx.g1.group is Group.G1 and ctx.gT.group is Group.GT
