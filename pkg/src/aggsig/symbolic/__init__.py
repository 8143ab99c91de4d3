from .terms import (Enc, Hash, IndexedAgg, Name, Nonce, Pk, RogueAgg, RoguePk, RogueSk, Sign, Term,
                    Tup, ValidAgg, ZeroAgg, render)
from .deduction import Knowledge, deduce
from .theories import (KeyRegistry, ModelId, Rule, VerificationOracle, adversary_rules,
                       plausible_pairs, vfy_symbolic)

__all__ = [
    "Enc", "Hash", "IndexedAgg", "Name", "Nonce", "Pk", "RogueAgg", "RoguePk", "RogueSk", "Sign",
    "Term", "Tup", "ValidAgg", "ZeroAgg", "render", "Knowledge", "deduce", "KeyRegistry", "ModelId",
    "Rule", "VerificationOracle", "adversary_rules", "plausible_pairs", "vfy_symbolic",
]
