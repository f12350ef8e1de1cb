"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes: InputError -> 1, GuardError -> 2,
ConsistencyError -> 3.
"""


class BcsiError(Exception):
    """Base class for all toolkit errors."""


class InputError(BcsiError):
    """Malformed user input: bad files, invalid masses, bad arguments."""


class GuardError(BcsiError):
    """A desk-scale safety cap was hit (alphabet product, inequality
    explosion during projection, codebook size)."""


class ConsistencyError(BcsiError):
    """Internal numeric sanity violated, e.g. a mutual information evaluating
    below -1e-9. Indicates a bug rather than bad input."""
