"""scenario-v1 documents: a protocol instance, a model, a lemma and bounds in one JSON object.

    {"schema": "scenario-v1", "protocol": "token-request",
     "roles": [{"kind": "Verifier", "actor": "V", "sessions": 1}, ...],
     "toggles": {"verifier_init": "OwnerIdentity"},
     "model": "A4", "lemma": "aliveness-owner",
     "bounds": {"max_sessions_per_role": 1}, "expect": "BoundedSafe"}

``expect`` is optional. Errors carry the line of the offending field.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..errors import ScenarioError, UsageError
from ..explorer.engine import Bounds
from ..symbolic.theories import ModelId
from .base import INIT_MODES, Toggles
from .sana import SanaProtocol
from .token_request import OWNER, TARGET, TokenRequestProtocol
from .toy import ToyProtocol

SCHEMA = "scenario-v1"
PROTOCOLS = ("toy", "token-request", "sana")
_KEYS = {"schema", "protocol", "roles", "toggles", "model", "lemma", "bounds", "expect", "description"}
_TOGGLES = {"verifier_init", "dishonest_keys_in_apk", "rogue_registration", "multi_owner"}
_ROLE_KEYS = {"kind", "actor", "sessions"}


@dataclass
class Scenario:
    protocol: str
    roles: list
    toggles: Toggles
    model: ModelId
    lemma: str
    bounds: Bounds
    expect: str | None = None
    description: str = ""

    def build(self):
        return build_protocol(self.protocol, self.roles, self.toggles)

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA,
            "protocol": self.protocol,
            "roles": [{"kind": k, "actor": a, "sessions": n} for k, a, n in self.roles],
            "toggles": {"verifier_init": self.toggles.init,
                        "dishonest_keys_in_apk": self.toggles.dishonest_keys_in_apk,
                        "rogue_registration": self.toggles.rogue_registration,
                        "multi_owner": self.toggles.multi_owner},
            "model": self.model.short,
            "lemma": self.lemma,
            "bounds": self.bounds.to_dict(),
        }
        if self.expect:
            d["expect"] = self.expect
        if self.description:
            d["description"] = self.description
        return d


def dumps_scenario(sc: Scenario) -> str:
    return json.dumps(sc.to_dict(), indent=2) + "\n"


def _line_of(text: str, field: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(field), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, line=e.lineno) from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object", line=1)

    def fail(msg, field):
        raise ScenarioError(msg, field=field, line=_line_of(text, field.split(".")[0].split("[")[0]))

    if doc.get("schema") != SCHEMA:
        fail(f"schema must be {SCHEMA!r}", "schema")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        fail(f"unknown field {unknown[0]!r}", unknown[0])
    for req in ("protocol", "roles", "model", "lemma"):
        if req not in doc:
            raise ScenarioError("missing required field", field=req, line=1)
    protocol = doc["protocol"]
    if protocol not in PROTOCOLS:
        fail(f"protocol must be one of {', '.join(PROTOCOLS)}", "protocol")

    roles = doc["roles"]
    if not isinstance(roles, list) or not roles:
        fail("roles must be a non-empty list", "roles")
    parsed_roles = []
    for i, r in enumerate(roles):
        where = f"roles[{i}]"
        if not isinstance(r, dict):
            fail("role must be an object", where)
        extra = sorted(set(r) - _ROLE_KEYS)
        if extra:
            fail(f"unknown role field {extra[0]!r}", where)
        kind, actor, n = r.get("kind"), r.get("actor"), r.get("sessions", 1)
        if not isinstance(kind, str) or not isinstance(actor, str):
            fail("role needs string 'kind' and 'actor'", where)
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            fail("sessions must be a positive integer", where)
        parsed_roles.append((kind, actor, n))

    tg = doc.get("toggles", {})
    if not isinstance(tg, dict):
        fail("toggles must be an object", "toggles")
    extra = sorted(set(tg) - _TOGGLES)
    if extra:
        fail(f"unknown toggle {extra[0]!r}", "toggles")
    init = tg.get("verifier_init", "None")
    if init not in INIT_MODES:
        fail(f"verifier_init must be one of {', '.join(INIT_MODES)}", "toggles")
    flags = {}
    for name in ("dishonest_keys_in_apk", "rogue_registration", "multi_owner"):
        if name in tg:
            if not isinstance(tg[name], bool):
                fail(f"{name} must be true or false", "toggles")
            flags[name] = tg[name]
    toggles = Toggles(init=init, **flags)

    try:
        model = ModelId.parse(str(doc["model"]))
    except UsageError as e:
        fail(str(e), "model")
    lemma = doc["lemma"]
    if not isinstance(lemma, str):
        fail("lemma must be a string", "lemma")

    bd = doc.get("bounds", {})
    if not isinstance(bd, dict):
        fail("bounds must be an object", "bounds")
    try:
        bounds = Bounds().override(**bd)
    except (UsageError, TypeError) as e:
        fail(str(e), "bounds")

    expect = doc.get("expect")
    if expect not in (None, "Falsified", "BoundedSafe"):
        fail("expect must be 'Falsified' or 'BoundedSafe'", "expect")

    sc = Scenario(protocol, parsed_roles, toggles, model, lemma, bounds, expect, doc.get("description", ""))
    try:
        inst = sc.build()
    except ScenarioError as e:
        raise ScenarioError(str(e), field="roles", line=_line_of(text, "roles")) from None
    try:
        inst.lemma(lemma)
    except UsageError as e:
        fail(str(e), "lemma")
    return sc


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}") from None
    return loads_scenario(text)


def build_protocol(protocol: str, roles: list, toggles: Toggles):
    """Map a role list onto the supported instance shapes, rejecting anything else."""
    by_kind: dict = {}
    for kind, actor, n in roles:
        by_kind.setdefault(kind, []).append((actor, n))
    actors = [a for _, a, _ in roles]
    if len(set(actors)) != len(actors):
        raise ScenarioError("each actor may appear only once")

    def only(allowed):
        bad = sorted(set(by_kind) - set(allowed))
        if bad:
            raise ScenarioError(f"role kind {bad[0]!r} is not part of the {protocol} protocol")

    if protocol == "toy":
        only({"Signer", "Aggregator", "Verifier"})
        if sorted(a for a, _ in by_kind.get("Signer", [])) != ["S1", "S2"]:
            raise ScenarioError("the toy protocol has exactly the signers S1 and S2")
        if [a for a, _ in by_kind.get("Aggregator", [])] != ["A"] or \
                [a for a, _ in by_kind.get("Verifier", [])] != ["V"]:
            raise ScenarioError("the toy protocol has one aggregator A and one verifier V")
        if any(n != 1 for k in ("Signer", "Aggregator") for _, n in by_kind[k]):
            raise ScenarioError("toy signers and the aggregator run a single session")
        return ToyProtocol(toggles, verifier_sessions=by_kind["Verifier"][0][1])

    kinds = {"Verifier", "Owner"} | ({"Prover", "Aggregator"} if protocol == "sana" else set())
    only(kinds)
    owners = by_kind.get("Owner", [])
    if [a for a, _ in owners] != [OWNER]:
        raise ScenarioError(f"exactly one owner, named {OWNER}, is required")
    verifiers = dict(by_kind.get("Verifier", []))
    if TARGET not in verifiers:
        raise ScenarioError(f"the target verifier {TARGET} is required")
    helpers = tuple((a, n) for a, n in by_kind["Verifier"] if a != TARGET)
    if protocol == "token-request":
        return TokenRequestProtocol(toggles, helpers=helpers, owner_sessions=owners[0][1],
                                    target_sessions=verifiers[TARGET])
    provers = sorted(a for a, _ in by_kind.get("Prover", []))
    if provers not in (["P1", "P2"], ["P1", "P2", "P3"]):
        raise ScenarioError("SANA needs two or three provers named P1, P2 (, P3)")
    aggs = [a for a, _ in by_kind.get("Aggregator", [])]
    if aggs not in ([], ["G"]):
        raise ScenarioError("the only aggregator is G")
    if owners[0][1] != 1 or verifiers[TARGET] != 1:
        raise ScenarioError("SANA runs one owner session and one target verifier session")
    if any(n != 1 for k in ("Prover", "Aggregator") for _, n in by_kind.get(k, [])):
        raise ScenarioError("provers and the aggregator run a single session")
    return SanaProtocol(toggles, provers=len(provers), helpers=helpers, aggregator=bool(aggs))


def cell_scenario(cell, bounds: Bounds | None = None) -> Scenario:
    """The scenario-v1 form of one matrix cell, matching what the matrix runner builds."""
    from ..explorer.matrix import HELPERS, SESSION_BOUNDS, sana_toggles
    bounds = bounds or SESSION_BOUNDS[cell.protocol]
    helpers = [("Verifier", a, n) for a, n in HELPERS]
    if cell.protocol == "toy":
        roles = [("Signer", "S1", 1), ("Signer", "S2", 1), ("Aggregator", "A", 1), ("Verifier", "V", 2)]
        toggles = Toggles()
    elif cell.protocol == "token-request":
        roles = [("Verifier", TARGET, 1)] + helpers + [("Owner", OWNER, 1)]
        toggles = Toggles(init=cell.column)
    else:
        roles = ([("Verifier", TARGET, 1)] + helpers + [("Owner", OWNER, 1)]
                 + [("Prover", "P1", 1), ("Prover", "P2", 1)])
        toggles = sana_toggles(cell.column)
    expect = "Falsified" if cell.expected == "F" else "BoundedSafe"
    return Scenario(cell.protocol, roles, toggles, cell.model, cell.lemma, bounds, expect,
                    f"{cell.protocol} {cell.column} {cell.model.short} {cell.lemma}")


def cell_filename(cell) -> str:
    return f"{cell.protocol}-{cell.column}-{cell.model.short}-{cell.lemma}.json".lower()
