import itertools
import random

import pytest

from aggsig.bls import gen, keypair_from_sk, sign
from aggsig.errors import UsageError
from aggsig.oas import (EMPTY, ClaimSet, OASSignature, claim_merge, lift_bls_to_oas, oas_agg,
                        oas_agg_pk, oas_sign, oas_vfy_agg)
from conftest import stub_ctx


@pytest.fixture
def sctx():
    return stub_ctx({b"M": 9, b"m": 5})


def test_agg_pk(sctx):
    g1 = sctx.g1
    assert oas_agg_pk([g1 ** 3, g1 ** 4]) == g1 ** 7
    assert oas_agg_pk([g1 ** 3]) == g1 ** 3
    assert oas_agg_pk([g1 ** 4, g1 ** 3]) == oas_agg_pk([g1 ** 3, g1 ** 4])
    with pytest.raises(UsageError):
        oas_agg_pk([])


def test_sign_cases(sctx):
    kp = keypair_from_sk(sctx, 3)
    s = oas_sign(sctx, b"M", b"M", kp)
    assert s == OASSignature(sctx.g0 ** 27, EMPTY)
    d = oas_sign(sctx, b"m", b"M", kp)
    assert d.tau == sctx.g0 ** 15
    assert d.claims == ClaimSet.of([(b"m", [kp.pk])])


def test_claim_merge(sctx):
    p1, p2 = sctx.g1 ** 1, sctx.g1 ** 2
    a = ClaimSet.of([(b"m", [p1])])
    b = ClaimSet.of([(b"m", [p2])])
    assert claim_merge(a, b) == ClaimSet.of([(b"m", [p1, p2])])
    assert claim_merge(EMPTY, a) == a
    c = ClaimSet.of([(b"x", [p2])])
    assert claim_merge(a, c) == ClaimSet.of([(b"m", [p1]), (b"x", [p2])])


def test_claim_merge_laws(ctx101):
    rng = random.Random(1)
    msgs = [b"a", b"b", b"c"]
    def rand_cs():
        items = {}
        for m in msgs:
            if rng.random() < 0.5:
                items[m] = [ctx101.g1 ** rng.randrange(1, 101) for _ in range(rng.randint(1, 2))]
        return ClaimSet.of(items.items())
    for _ in range(100):
        x, y, z = rand_cs(), rand_cs(), rand_cs()
        assert claim_merge(x, y) == claim_merge(y, x)
        assert claim_merge(claim_merge(x, y), z) == claim_merge(x, claim_merge(y, z))
        assert claim_merge(x, x) == x


def test_claimset_rejects_bad_input(ctx101):
    with pytest.raises(UsageError):
        ClaimSet.of([(b"m", [ctx101.g1]), (b"m", [ctx101.g1 ** 2])])
    with pytest.raises(UsageError):
        ClaimSet.of([(b"m", [])])


def test_agg_examples(sctx):
    k1, k2 = keypair_from_sk(sctx, 3), keypair_from_sk(sctx, 4)
    both = oas_agg(oas_sign(sctx, b"M", b"M", k1), oas_sign(sctx, b"M", b"M", k2))
    assert both == OASSignature(sctx.g0 ** 63, EMPTY)
    mixed = oas_agg(oas_sign(sctx, b"M", b"M", k1), oas_sign(sctx, b"m", b"M", k2))
    assert mixed.tau == sctx.g0 ** 47
    assert mixed.claims == ClaimSet.of([(b"m", [sctx.g1 ** 4])])


def test_agg_rejects_overlap(sctx):
    k = keypair_from_sk(sctx, 4)
    s = oas_sign(sctx, b"m", b"M", k)
    with pytest.raises(UsageError):
        oas_agg(s, s)


def test_vfy_examples(sctx):
    g0, g1 = sctx.g0, sctx.g1
    assert oas_vfy_agg(sctx, [], OASSignature(g0 ** 63, EMPTY), b"M", g1 ** 7) == EMPTY
    cs = ClaimSet.of([(b"m", [g1 ** 4])])
    assert oas_vfy_agg(sctx, [], OASSignature(g0 ** 47, cs), b"M", g1 ** 7) == cs
    assert oas_vfy_agg(sctx, [], OASSignature(g0 ** 48, cs), b"M", g1 ** 7) is None


def test_vfy_bottom_on_claimed_signer_in_sbot(sctx):
    g0, g1 = sctx.g0, sctx.g1
    cs = ClaimSet.of([(b"m", [g1 ** 4])])
    assert oas_vfy_agg(sctx, [g1 ** 4], OASSignature(g0 ** 47, cs), b"M", g1 ** 7) is None


def test_vfy_with_sbot(sctx):
    # signer 5 stayed silent; dividing it out restores the equation
    k1, k2 = keypair_from_sk(sctx, 3), keypair_from_sk(sctx, 4)
    silent = sctx.g1 ** 5
    apk = oas_agg_pk([k1.pk, k2.pk, silent])
    s = oas_agg(oas_sign(sctx, b"M", b"M", k1), oas_sign(sctx, b"M", b"M", k2))
    assert oas_vfy_agg(sctx, [silent], s, b"M", apk) == EMPTY
    assert oas_vfy_agg(sctx, [], s, b"M", apk) is None


def test_correctness_i(ctx_large):
    rng = random.Random(100)
    for seed in range(200):
        kp = gen(ctx_large, rng)
        others = [gen(ctx_large, rng) for _ in range(rng.randint(0, 5))]
        M = f"M{seed}".encode()
        m = M if rng.random() < 0.5 else f"m{seed}".encode()
        sbot = [o.pk for o in others if rng.random() < 0.5]
        apk = oas_agg_pk([kp.pk] + sbot)
        got = oas_vfy_agg(ctx_large, sbot, oas_sign(ctx_large, m, M, kp), M, apk)
        want = EMPTY if m == M else ClaimSet.of([(m, [kp.pk])])
        assert got == want


def _random_aggregate(ctx, rng, keys, M, choices):
    sig = None
    for kp in keys:
        m = rng.choice(choices)
        s = oas_sign(ctx, m, M, kp)
        sig = s if sig is None else oas_agg(sig, s)
    return sig


def test_correctness_ii(ctx_large):
    rng = random.Random(200)
    for seed in range(200):
        n = rng.randint(2, 6)
        keys = [gen(ctx_large, rng) for _ in range(n)]
        cut = rng.randint(1, n - 1)
        s1_keys, s2_keys = keys[:cut], keys[cut:]
        M = f"M{seed}".encode()
        choices = [M, M, f"a{seed}".encode(), f"b{seed}".encode()]
        a1 = _random_aggregate(ctx_large, rng, s1_keys, M, choices)
        a2 = _random_aggregate(ctx_large, rng, s2_keys, M, choices)
        apk1, apk2 = oas_agg_pk([k.pk for k in s1_keys]), oas_agg_pk([k.pk for k in s2_keys])
        r1 = oas_vfy_agg(ctx_large, [], a1, M, apk1)
        r2 = oas_vfy_agg(ctx_large, [], a2, M, apk2)
        assert r1 is not None and r2 is not None
        both = oas_vfy_agg(ctx_large, [], oas_agg(a1, a2), M, oas_agg_pk([apk1, apk2]))
        assert both == claim_merge(r1, r2)


def test_lift_both_cases(ctx_large):
    rng = random.Random(300)
    for seed in range(200):
        kp = gen(ctx_large, rng)
        M = f"M{seed}".encode()
        m = M if seed % 2 == 0 else f"m{seed}".encode()
        lifted = lift_bls_to_oas(sign(ctx_large, m, kp.sk), m, M, kp.pk)
        want = EMPTY if m == M else ClaimSet.of([(m, [kp.pk])])
        assert lifted.claims == want
        assert oas_vfy_agg(ctx_large, [], lifted, M, kp.pk) == want


def test_lifted_aggregates_with_native(ctx_large):
    rng = random.Random(400)
    for seed in range(100):
        M = f"M{seed}".encode()
        bls_kp = gen(ctx_large, rng)
        native = [gen(ctx_large, rng) for _ in range(rng.randint(1, 4))]
        m = f"x{seed}".encode() if seed % 2 else M
        acc = lift_bls_to_oas(sign(ctx_large, m, bls_kp.sk), m, M, bls_kp.pk)
        for kp in native:
            acc = oas_agg(acc, oas_sign(ctx_large, M, M, kp))
        apk = oas_agg_pk([bls_kp.pk] + [k.pk for k in native])
        want = EMPTY if m == M else ClaimSet.of([(m, [bls_kp.pk])])
        assert oas_vfy_agg(ctx_large, [], acc, M, apk) == want
