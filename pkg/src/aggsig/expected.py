"""Reference verdicts the matrices are regression-checked against.

P = bounded-safe (the published analysis proves the property), F = falsified.
"""
from __future__ import annotations

from .symbolic.theories import ModelId

P, F = "P", "F"

TOY_LEMMAS = ("MA", "WA", "NSZ", "NRK")

# Toy protocol, six aggregate-signature models x four lemmas. Weak agreement
# fails everywhere because signers never name a verifier; splitting zero needs
# free messages under dishonest keys (V2, V3, A5); rogue keys break message
# authenticity only where the model has them (V3, A6).
TOY = {
    ModelId.V1_NoDishonest: dict(zip(TOY_LEMMAS, (P, F, P, P))),
    ModelId.V2_Dishonest: dict(zip(TOY_LEMMAS, (P, F, F, P))),
    ModelId.V3_RogueKey: dict(zip(TOY_LEMMAS, (F, F, F, F))),
    ModelId.A4_Plain: dict(zip(TOY_LEMMAS, (P, F, P, P))),
    ModelId.A5_Colliding: dict(zip(TOY_LEMMAS, (P, F, F, P))),
    ModelId.A6_RogueKey: dict(zip(TOY_LEMMAS, (F, F, P, F))),
}

TR_INITS = ("None", "OwnerIdentity")
TR_LEMMAS = ("aliveness-owner", "aliveness-verifier", "weak-agreement-owner", "weak-agreement-verifier")

# Token Request: only the owner-identity initialisation gives the verifier
# aliveness of the owner; weak agreement fails for both parties either way.
TOKEN_REQUEST = {
    ("aliveness-owner", "None"): P,
    ("aliveness-owner", "OwnerIdentity"): P,
    ("aliveness-verifier", "None"): F,
    ("aliveness-verifier", "OwnerIdentity"): P,
    ("weak-agreement-owner", "None"): F,
    ("weak-agreement-owner", "OwnerIdentity"): F,
    ("weak-agreement-verifier", "None"): F,
    ("weak-agreement-verifier", "OwnerIdentity"): F,
}

SANA_LEMMAS = ("attestation-agreement", "token-agreement")

# SANA, four model classes. Each column lists the models it is run under.
SANA_COLUMNS = {
    "init-none": (ModelId.A4_Plain,),
    "init-owner": tuple(ModelId),
    "dishonest-apk": (ModelId.V1_NoDishonest, ModelId.V2_Dishonest, ModelId.A4_Plain, ModelId.A5_Colliding),
    "rogue-apk": (ModelId.V3_RogueKey, ModelId.A6_RogueKey),
}

SANA = {
    ("attestation-agreement", "init-none"): F,
    ("attestation-agreement", "init-owner"): P,
    ("attestation-agreement", "dishonest-apk"): P,
    ("attestation-agreement", "rogue-apk"): F,
    ("token-agreement", "init-none"): P,
    ("token-agreement", "init-owner"): P,
    ("token-agreement", "dishonest-apk"): P,
    ("token-agreement", "rogue-apk"): P,
}
