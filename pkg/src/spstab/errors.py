"""Exception types shared across the package."""


class SpstabError(ValueError):
    pass


class NotPrime(SpstabError):
    pass


class NotAUnit(SpstabError):
    pass


class NotSquare(SpstabError):
    pass


class NotSkew(SpstabError):
    pass


class OddSize(SpstabError):
    pass


class NotAComplex(SpstabError):
    pass


class CapExceeded(SpstabError):
    pass


class NotBasisUnit(SpstabError):
    pass


class DegreeBound(SpstabError):
    pass


class NotDefinedAt(SpstabError):
    """Raised when a denominator of an admissible function is not a unit.

    ``index`` is 1-based, matching the numbering of the pairs (P_i, Q_i).
    """

    def __init__(self, index, t=None):
        self.index = index
        self.t = t
        super().__init__(f"Q_{index}({t}) is not a unit")


class LimitUndefined(SpstabError):
    pass


class NotOddSymplectic(SpstabError):
    pass


class RankOrder(SpstabError):
    pass


class NotNondegenerate(SpstabError):
    pass


class RankBound(SpstabError):
    pass


class InputNotNondegenerate(SpstabError):
    pass


class IncompatibleCoefficients(SpstabError):
    pass


class ConfigError(SpstabError):
    pass
