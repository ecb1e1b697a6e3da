"""Exception hierarchy shared by every module.

``InputError`` means the caller handed us malformed data (CLI exit code 1).
``Refusal`` means a configured cap or an undecided search stopped the
computation before a sound answer was reached (CLI exit code 2).
"""


class QcovError(Exception):
    """Base class for all library errors."""


class InputError(QcovError, ValueError):
    """Malformed quiver, morphism, relation or representation data."""


class LiftError(QcovError):
    """A path or walk has no lift at the requested anchor."""


class Refusal(QcovError):
    """A cap was hit or a search stayed undecided; no verdict is given."""
