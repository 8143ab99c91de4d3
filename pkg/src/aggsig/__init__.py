"""BLS aggregate signatures over a simulated pairing, plus a bounded symbolic explorer."""

__version__ = "0.1.0"
