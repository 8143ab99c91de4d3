from .engine import Bounds, BoundedSafe, Explorer, Falsified, RestrictionMonitor, explore
from .events import Event, TraceEvent
from .lemmas import Lemma, LemmaContext, LemmaKind, check_lemma

__all__ = ["Bounds", "BoundedSafe", "Explorer", "Falsified", "RestrictionMonitor", "explore", "Event",
           "TraceEvent", "Lemma", "LemmaContext", "LemmaKind", "check_lemma"]
