"""Exception hierarchy shared by every module.

``InputError`` maps to CLI exit code 2, ``InternalError`` to exit code 3.
"""


class ToricAltError(Exception):
    pass


class InputError(ToricAltError, ValueError):
    """Malformed or mathematically invalid input (bad cone, bad root, ...)."""


class InternalError(ToricAltError, RuntimeError):
    """A safety cap fired or a proven invariant failed; indicates a bug."""
