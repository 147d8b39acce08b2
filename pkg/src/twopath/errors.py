"""Exception hierarchy.

Errors fall in two families: ``InputError`` for malformed or inconsistent
inputs, and ``InfeasibleError`` for well-formed requests that have no
mathematical solution (the CLI maps these to distinct exit codes).
"""


class TwoPathError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TwoPathError, ValueError):
    pass


class InfeasibleError(TwoPathError, ValueError):
    pass


class DimensionError(InputError):
    pass


class ParseError(InputError):
    pass


class ChannelsDiffer(InputError):
    pass


class NotLinearlyIndependent(InputError):
    pass


class NotCanonical(InputError):
    pass


class NotOrthonormal(InputError):
    pass


class NotUnitary(InputError):
    pass


class InvalidGluing(InputError):
    pass


class NotLSP(InputError):
    pass


class NotARepresentation(InputError):
    pass


class OracleInconsistent(InputError):
    pass


class InvariantViolation(TwoPathError):
    """An assembled object failed one of its invariants; ``check`` names it."""

    def __init__(self, check, detail=""):
        self.check = check
        super().__init__(f"{check}: {detail}" if detail else check)


class RankDeficient(TwoPathError):
    """Raised when a linear reconstruction is underdetermined.

    The minimal-norm solution on the spanned subspace is attached as
    ``solution`` together with the achieved ``rank``.
    """

    def __init__(self, solution, rank, full_rank):
        self.solution = solution
        self.rank = rank
        self.full_rank = full_rank
        super().__init__(f"rank {rank} < {full_rank}")


class NotSpanning(TwoPathError):
    def __init__(self, rank, required):
        self.rank = rank
        self.required = required
        super().__init__(f"family spans rank {rank}, need {required}")


class NormTooLarge(InfeasibleError):
    pass


class AncillaTooSmall(InfeasibleError):
    pass


class NotMaximal(InfeasibleError):
    pass
