"""Exception types shared by the word, tree and construction services.

Bad input is a ``ValueError`` (the CLI exits 1); an internal consistency
check that fails is an ``InvariantError`` (the CLI exits 2).
"""
from __future__ import annotations


class MalformedLetterError(ValueError):
    """A letter is zero or exceeds the ambient rank."""


class RankMismatchError(ValueError):
    """Two words from free groups of different rank were combined."""


class TrivialWordError(ValueError):
    """An operation that needs a nontrivial element received the identity."""


class MissingImageError(ValueError):
    """A homomorphism has no image for a generator that occurs."""


class HypothesisError(ValueError):
    """Input violates the non-commutation hypotheses of a lemma."""

    def __init__(self, message: str, violations: list[str] | None = None) -> None:
        super().__init__(message)
        self.violations = list(violations or [])


class PatternError(ValueError):
    """A pattern or exponent list does not match the instance."""


class CapExceededError(ValueError):
    """A configured enumeration or search cap would be exceeded."""


class UnknownNameError(ValueError):
    """A catalog entry, subcommand or generator name is not known."""


class InvariantError(RuntimeError):
    """An exact post-condition check failed; indicates a bug."""
