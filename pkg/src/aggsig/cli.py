"""Command-line front end.

    aggsig matrix {toy,token-request,sana}      reproduce a result table (exit 1 on deviation)
    aggsig attack NAME [--seed N]              concrete or scripted attack
    aggsig explore SCENARIO.json [options]     one scenario; exit 0 bounded-safe, 10 falsified

Usage errors exit with status 2.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .errors import UsageError

EXIT_SAFE, EXIT_DEVIATION, EXIT_USAGE, EXIT_FALSIFIED = 0, 1, 2, 10
CONCRETE = ("rogue-key", "splitting-zero", "zero-key")


def _parse_bounds(items):
    out = {}
    for item in items or ():
        for part in item.split(","):
            if not part.strip():
                continue
            key, sep, val = part.partition("=")
            if not sep:
                raise UsageError(f"--bounds expects key=value, got {part!r}")
            try:
                out[key.strip()] = int(val)
            except ValueError:
                raise UsageError(f"bound {key.strip()!r} must be an integer, got {val!r}") from None
    return out


def _emit_trace(trace, fmt: str, out) -> None:
    from .explorer.trace_io import dumps_trace, render_trace
    out.write(dumps_trace(trace) if fmt == "structured" else render_trace(trace))


# matrix ---------------------------------------------------------------------

def cmd_matrix(args, out) -> int:
    from .explorer.matrix import SESSION_BOUNDS, run_matrix
    from .explorer.trace_io import dumps_trace
    if args.protocol not in SESSION_BOUNDS:
        raise UsageError(f"unknown protocol {args.protocol!r}; expected one of {', '.join(SESSION_BOUNDS)}")
    bounds = SESSION_BOUNDS[args.protocol].override(**_parse_bounds(args.bounds))
    res = run_matrix(args.protocol, bounds, jobs=args.jobs, monitor=args.monitor,
                     schedules=args.schedules, seed=args.seed)
    if args.format == "structured":
        out.write(res.records())
    else:
        out.write(res.render())
        for r in res.results:
            if r.trace:
                out.write(f"counterexample {r.cell.label}: {len(r.trace)} events\n")
    if args.traces:
        os.makedirs(args.traces, exist_ok=True)
        for r in res.results:
            if r.trace:
                name = r.cell.label.replace("/", "_") + ".jsonl"
                with open(os.path.join(args.traces, name), "w", encoding="utf-8") as fh:
                    fh.write(dumps_trace(r.trace))
    return EXIT_DEVIATION if res.deviations else EXIT_SAFE


# attack -----------------------------------------------------------------------

def _verdict(ok: bool) -> str:
    return "ACCEPT" if ok else "REJECT"


def attack_rogue_key(seed: int, out) -> bool:
    from . import aggregate as ag
    from .bls import gen
    from .pairing import PairingContext
    ctx = PairingContext(2 ** 61 - 1)
    rng = random.Random(seed)
    target = gen(ctx, rng)
    m = b"transfer 100 to mallory"
    alpha = rng.randrange(1, ctx.q)
    pk_rogue, sigma = ag.rogue_key_forge(ctx, target.pk, m, alpha=alpha)
    lines = [
        f"q = {ctx.q}",
        f"target pk        = {target.pk}",
        f"alpha            = {alpha}",
        f"rogue pk         = g1^alpha / pk_target = {pk_rogue}",
        f"forged aggregate = H(m)^alpha = {sigma}",
        f"claimed signers  = (m, pk_target), (m, pk_rogue)",
    ]
    naive = ag.vfy_agg_naive(ctx, sigma, [m, m], [target.pk, pk_rogue])
    augmented = ag.vfy_agg_augmented(ctx, sigma, [m, m], [target.pk, pk_rogue])
    # the attacker's best proof for the rogue key reuses alpha, the only exponent it knows
    rogue_pop = ag.PopKey(pk_rogue, ctx.hash_prime_to_g0(pk_rogue.to_bytes()) ** alpha)
    pop = ag.vfy_agg_pop(ctx, sigma, [m, m], [ag.pop_for(ctx, target.sk), rogue_pop])
    lines.append(f"naive: {_verdict(naive)}, augmented: {_verdict(augmented)}, pop: {_verdict(pop)}")
    out.write("\n".join(lines) + "\n")
    return naive and not augmented and not pop


def attack_splitting_zero(seed: int, out) -> bool:
    from . import aggregate as ag
    from .bls import gen, sign
    from .pairing import PairingContext
    ctx = PairingContext(101)
    rng = random.Random(seed)
    honest = gen(ctx, rng)
    k1, k2 = ag.splitting_zero_keypairs(ctx, rng)
    m, x, y = b"firmware ok", b"attacker message A", b"attacker message B"
    sa = ag.agg([sign(ctx, m, honest.sk), sign(ctx, x, k1.sk), sign(ctx, x, k2.sk)])
    zero = ag.agg([sign(ctx, x, k1.sk), sign(ctx, x, k2.sk)])
    msgs_x, msgs_y = [m, x, x], [m, y, y]
    pks = [honest.pk, k1.pk, k2.pk]
    ok_x = ag.vfy_agg_naive(ctx, sa, msgs_x, pks)
    ok_y = ag.vfy_agg_naive(ctx, sa, msgs_y, pks)
    pop = ag.vfy_agg_pop(ctx, sa, msgs_y, [ag.pop_for(ctx, honest.sk), ag.pop_for(ctx, k1.sk),
                                          ag.pop_for(ctx, k2.sk)])
    out.write("\n".join([
        f"q = {ctx.q}",
        f"sk1 = {k1.sk}, sk2 = {k2.sk}  (sk1 + sk2 = 0 mod q)",
        f"pk1 * pk2 = {k1.pk * k2.pk}",
        f"sig1(x) * sig2(x) = {zero}  (identity)",
        f"aggregate = {sa}",
        f"verify with (m, x, x): {_verdict(ok_x)}",
        f"verify with substitute (m, y, y): {_verdict(ok_y)}",
        f"pop with substitute: {_verdict(pop)}",
    ]) + "\n")
    return ok_x and ok_y and pop and zero.is_identity


def attack_zero_key(seed: int, out) -> bool:
    from .bls import vfy
    from .pairing import Group, PairingContext
    ctx = PairingContext(101)
    rng = random.Random(seed)
    pk, sigma = ctx.identity(Group.G1), ctx.identity(Group.G0)
    msgs = [f"message {rng.randrange(10 ** 6)}".encode() for _ in range(3)]
    plain = all(vfy(ctx, sigma, msg, pk, identity_check=False) for msg in msgs)
    checked = any(vfy(ctx, sigma, msg, pk, identity_check=True) for msg in msgs)
    out.write("\n".join([
        f"q = {ctx.q}",
        f"pk = {pk}, sigma = {sigma}",
        *[f"verify {msg.decode()!r} without identity check: {_verdict(vfy(ctx, sigma, msg, pk, False))}"
          for msg in msgs],
        f"with identity check: {_verdict(checked)}",
    ]) + "\n")
    return plain and not checked


def cmd_attack(args, out) -> int:
    name = args.name.strip().lower()
    if name in CONCRETE:
        run = {"rogue-key": attack_rogue_key, "splitting-zero": attack_splitting_zero,
               "zero-key": attack_zero_key}[name]
        if not run(args.seed, out):
            out.write("unexpected verification outcome\n")
            return EXIT_DEVIATION
        return EXIT_SAFE
    from .protocols.attacks import scripted_attack
    from .symbolic.theories import ModelId
    attack = scripted_attack(name, ModelId.parse(args.model) if args.model else None)
    trace, violated = attack.run()
    if args.format == "text":
        out.write(f"# {attack.name}: {attack.summary} ({attack.model.short})\n")
    _emit_trace(trace, args.format, out)
    if args.format == "text":
        out.write(f"lemma {attack.lemma}: {'violated' if violated else 'holds'}\n" if attack.lemma
                  else "no lemma attached\n")
    return EXIT_FALSIFIED if violated else EXIT_SAFE


# explore ----------------------------------------------------------------------

def cmd_explore(args, out) -> int:
    from .explorer.engine import Explorer
    from .protocols.scenario_io import load_scenario
    from .symbolic.theories import ModelId
    sc = load_scenario(args.scenario)
    model = ModelId.parse(args.model) if args.model else sc.model
    bounds = sc.bounds.override(**_parse_bounds(args.bounds))
    inst = sc.build()
    lemma = inst.lemma(args.lemma or sc.lemma)
    ex = Explorer(inst, model, lemma, bounds)
    v = ex.explore()
    if v.verdict == "BoundedSafe" and args.schedules:
        walker = Explorer(inst, model, lemma, bounds, reduce=False)
        found = walker.random_schedules(args.schedules, args.seed)
        if found is not None:
            v = found
    if args.format == "structured":
        head = {"schema": "verdict-v1", "verdict": v.verdict, "model": model.short, "lemma": lemma.label,
                "states_explored": v.states_explored, "bounds": bounds.to_dict()}
        out.write(json.dumps(head, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        out.write(f"{lemma.label} under {model.short}: {v.verdict} ({v.states_explored} states; "
                  f"{bounds.describe()})\n")
        if v.verdict == "BoundedSafe":
            out.write("bounded verification only: no counterexample exists within these bounds\n")
    if v.verdict == "Falsified":
        _emit_trace(v.trace, args.format, out)
        return EXIT_FALSIFIED
    return EXIT_SAFE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aggsig", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("text", "structured"), default="text")

    m = sub.add_parser("matrix", help="run a result matrix against the reference table")
    m.add_argument("protocol")
    m.add_argument("--bounds", action="append", metavar="KEY=VAL")
    m.add_argument("--jobs", type=int, default=None, help="worker processes (default: $AGGSIG_JOBS or 1)")
    m.add_argument("--schedules", type=int, default=None, help="random schedules per bounded-safe cell")
    m.add_argument("--monitor", action="store_true", help="re-check the validation-model restrictions")
    m.add_argument("--traces", metavar="DIR", help="write each counterexample as a trace-v1 file")
    common(m)

    a = sub.add_parser("attack", help="run a concrete or scripted attack")
    a.add_argument("name")
    a.add_argument("--model", help="aggregate model for scripted attacks")
    common(a)

    e = sub.add_parser("explore", help="explore one scenario file")
    e.add_argument("scenario")
    e.add_argument("--model")
    e.add_argument("--lemma")
    e.add_argument("--bounds", action="append", metavar="KEY=VAL")
    e.add_argument("--schedules", type=int, default=0, help="random schedules after a bounded-safe search")
    common(e)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    handler = {"matrix": cmd_matrix, "attack": cmd_attack, "explore": cmd_explore}[args.command]
    try:
        return handler(args, out)
    except UsageError as e:
        print(f"aggsig: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
