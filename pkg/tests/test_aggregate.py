import itertools
import random

import numpy as np
import pytest

from aggsig.aggregate import (agg, batch_rogue_forgeries, batch_vfy_agg_exponents,
                              enumerate_formal_combinations, formal_span_contains, gen_pop,
                              pop_for, PopKey, rogue_key_forge, rogue_pop_target,
                              sign_augmented, splitting_zero_keypairs, splitting_zero_keys,
                              vfy_agg_augmented, vfy_agg_distinct, vfy_agg_hashed,
                              vfy_agg_naive, vfy_agg_pop, vfy_agg_same_message, vfy_pop)
from aggsig.bls import gen, keypair_from_sk, sign, vfy
from aggsig.errors import UsageError
from aggsig.oas import oas_agg_pk
from aggsig.pairing import Group
from conftest import stub_ctx


def test_agg_examples(ctx101):
    g0 = ctx101.g0
    assert agg([g0 ** 35]) == g0 ** 35
    assert agg([g0 ** 49, g0 ** 52]).is_identity
    sigs = [g0 ** 3, g0 ** 40, g0 ** 77]
    assert len({agg(p) for p in itertools.permutations(sigs)}) == 1
    with pytest.raises(UsageError):
        agg([])


def test_naive_honest_and_swapped():
    ctx = stub_ctx({b"m1": 5, b"m2": 11})
    k1, k2 = keypair_from_sk(ctx, 3), keypair_from_sk(ctx, 4)
    sa = agg([sign(ctx, b"m1", 3), sign(ctx, b"m2", 4)])
    assert vfy_agg_naive(ctx, sa, [b"m1", b"m2"], [k1.pk, k2.pk])
    # 5*4 + 11*3 = 53 != 59
    assert not vfy_agg_naive(ctx, sa, [b"m2", b"m1"], [k1.pk, k2.pk])
    assert not vfy_agg_naive(ctx, sa, [b"m1"], [k1.pk, k2.pk])
    assert not vfy_agg_naive(ctx, sa, [], [])


def test_same_message_example():
    ctx = stub_ctx({b"M": 9})
    sa = ctx.g0 ** 63
    assert vfy_agg_same_message(ctx, sa, b"M", ctx.g1 ** 7)
    assert not vfy_agg_same_message(ctx, sa, b"M", ctx.g1 ** 3)


def test_same_message_agrees_with_naive(ctx_large):
    rng = random.Random(11)
    for trial in range(60):
        n = rng.randint(1, 6)
        kps = [gen(ctx_large, rng) for _ in range(n)]
        m = f"M{trial}".encode()
        sigs = [sign(ctx_large, m, kp.sk) for kp in kps]
        if rng.random() < 0.3:
            sigs[0] = sigs[0] * ctx_large.g0
        sa = agg(sigs)
        apk = oas_agg_pk([kp.pk for kp in kps])
        assert vfy_agg_same_message(ctx_large, sa, m, apk) == \
            vfy_agg_naive(ctx_large, sa, [m] * n, [kp.pk for kp in kps])


def test_correctness_randomized(ctx_large):
    rng = random.Random(5)
    for trial in range(80):
        n = rng.randint(1, 8)
        kps = [gen(ctx_large, rng) for _ in range(n)]
        msgs = [f"t{trial}-{i}-{rng.randrange(3)}".encode() for i in range(n)]
        sigs = [sign(ctx_large, m, kp.sk) for m, kp in zip(msgs, kps)]
        assert all(vfy(ctx_large, s, m, kp.pk) for s, m, kp in zip(sigs, msgs, kps))
        assert vfy_agg_naive(ctx_large, agg(sigs), msgs, [kp.pk for kp in kps])


def test_rogue_forge_example():
    ctx = stub_ctx({b"m": 5})
    target = keypair_from_sk(ctx, 7)
    pk_rogue, sigma = rogue_key_forge(ctx, target.pk, b"m", alpha=20)
    assert pk_rogue == ctx.g1 ** 13
    assert sigma == ctx.g0 ** 100
    assert vfy_agg_naive(ctx, sigma, [b"m", b"m"], [target.pk, pk_rogue])
    assert not vfy_agg_distinct(ctx, sigma, [b"m", b"m"], [target.pk, pk_rogue])
    assert not vfy_agg_augmented(ctx, sigma, [b"m", b"m"], [target.pk, pk_rogue])


def test_distinct_rules(ctx101):
    k1, k2 = gen(ctx101, 1), gen(ctx101, 2)
    sa = agg([sign(ctx101, b"a", k1.sk), sign(ctx101, b"b", k2.sk)])
    assert vfy_agg_distinct(ctx101, sa, [b"a", b"b"], [k1.pk, k2.pk])
    dup = agg([sign(ctx101, b"a", k1.sk), sign(ctx101, b"a", k2.sk)])
    assert vfy_agg_naive(ctx101, dup, [b"a", b"a"], [k1.pk, k2.pk])
    assert not vfy_agg_distinct(ctx101, dup, [b"a", b"a"], [k1.pk, k2.pk])
    # str and bytes of the same content encode identically
    assert not vfy_agg_distinct(ctx101, dup, ["a", b"a"], [k1.pk, k2.pk])


def test_augmented(ctx_large):
    rng = random.Random(2)
    k1, k2 = gen(ctx_large, rng), gen(ctx_large, rng)
    sa = agg([sign_augmented(ctx_large, b"x", k1), sign_augmented(ctx_large, b"y", k2)])
    assert vfy_agg_augmented(ctx_large, sa, [b"x", b"y"], [k1.pk, k2.pk])
    plain = agg([sign(ctx_large, b"x", k1.sk), sign(ctx_large, b"y", k2.sk)])
    assert not vfy_agg_augmented(ctx_large, plain, [b"x", b"y"], [k1.pk, k2.pk])


def test_pop_honest_and_identity(ctx101):
    sk, k = gen_pop(ctx101, 4)
    assert vfy_pop(ctx101, k)
    target = gen(ctx101, 9)
    pk_rogue, _ = rogue_key_forge(ctx101, target.pk, b"m", alpha=20)
    assert not vfy_pop(ctx101, PopKey(pk_rogue, ctx101.identity(Group.G0)))


def test_honest_aggregate_with_pops(ctx_large):
    rng = random.Random(8)
    keys = [gen_pop(ctx_large, rng) for _ in range(4)]
    msgs = [b"a", b"b", b"c", b"d"]
    sa = agg([sign(ctx_large, m, sk) for m, (sk, _) in zip(msgs, keys)])
    assert vfy_agg_pop(ctx_large, sa, msgs, [k for _, k in keys])


def test_rogue_pop_not_derivable_algebraically():
    q, alpha = 101, 20
    known = [
        {("g0",): 1},                 # generator
        {("H'", "u"): 1},             # H'(u_rogue)
        {("H'", "u_t"): 1},           # H'(u_target)
        {("H", "m"): 1},              # H(m)
        {("H", "m", "sk_t"): 1},      # honest signature on m
        {("H'", "u_t", "sk_t"): 1},   # honest PoP of the target
    ]
    target = rogue_pop_target("u", alpha)
    assert not formal_span_contains(q, known, target)
    # Positive control: without domain separation a target signature on u's
    # encoding would sit on the same hash point and the PoP becomes derivable.
    leaked = known + [{("H'", "u", "sk_t"): 1}]
    assert formal_span_contains(q, leaked, target)


def test_rogue_pop_enumeration_small():
    q = 101
    known = [{("H'", "u"): 1}, {("H", "m", "sk_t"): 1}, {("H'", "u_t", "sk_t"): 1}]
    target = rogue_pop_target("u", 20)
    assert enumerate_formal_combinations(q, known, target) == 0
    leaked = [{("H'", "u"): 1}, {("H'", "u", "sk_t"): 1}, {("H", "m", "sk_t"): 1}]
    assert enumerate_formal_combinations(q, leaked, target) == 1


def test_splitting_zero(ctx101):
    sk1, sk2 = splitting_zero_keys(ctx101, 3)
    assert (sk1 + sk2) % 101 == 0 and sk1 and sk2
    assert agg([sign(ctx101, b"m", 30), sign(ctx101, b"m", 71)]).is_identity
    a, b = splitting_zero_keypairs(ctx101, 3)
    assert not a.pk.is_identity and not b.pk.is_identity
    honest = gen(ctx101, 17)
    sa = agg([sign(ctx101, b"m", a.sk), sign(ctx101, b"m", b.sk), sign(ctx101, b"m3", honest.sk)])
    for i in range(50):
        sub = f"sub{i}".encode()
        assert vfy_agg_naive(ctx101, sa, [sub, sub, b"m3"], [a.pk, b.pk, honest.pk])
    # exhaustive over every G0 point as the substitute hash
    h3 = ctx101.hash_to_g0(b"m3")
    for e in range(101):
        h = ctx101.g0 ** e
        assert vfy_agg_hashed(ctx101, sa, [h, h, h3], [a.pk, b.pk, honest.pk])
    pops = [pop_for(ctx101, a.sk), pop_for(ctx101, b.sk), pop_for(ctx101, honest.sk)]
    assert vfy_agg_pop(ctx101, sa, [b"zz", b"zz", b"m3"], pops)


def test_batch_matches_scalar(ctx_large):
    rng = random.Random(1)
    q = ctx_large.q
    n = 200
    sk = [rng.randrange(1, q) for _ in range(n)]
    al = [rng.randrange(1, q) for _ in range(n)]
    h = [rng.randrange(1, q) for _ in range(n)]
    assert batch_rogue_forgeries(q, sk, al, h).all()
    sigma = np.array([(x * y + 1) % q for x, y in zip(h, al)], dtype=np.uint64)
    hashes = np.stack([np.array(h, dtype=np.uint64)] * 2, axis=1)
    pks = np.stack([np.array(sk, dtype=np.uint64), np.array([(a - s) % q for a, s in zip(al, sk)], dtype=np.uint64)], axis=1)
    assert not batch_vfy_agg_exponents(q, sigma, hashes, pks).any()
