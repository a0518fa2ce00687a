"""Exception types shared across the package."""


class HodgeWittError(Exception):
    """Base class for all errors raised by this package."""


class ModulusMismatch(HodgeWittError, ValueError):
    """Operands live over different coefficient rings Z/p^N."""


class DimensionMismatch(HodgeWittError, ValueError):
    pass


class RosterMismatch(HodgeWittError, ValueError):
    """Operands use different variable rosters or precisions."""


class NotAUnit(HodgeWittError, ValueError):
    pass


class NotClosedError(HodgeWittError, ValueError):
    pass


class PrecisionError(HodgeWittError, ArithmeticError):
    """An exact p-adic division failed; the working precision is too small."""


class ResourceError(HodgeWittError, RuntimeError):
    """A computation exceeded the configured size cap."""


class InvalidChainMap(HodgeWittError, ValueError):
    pass


class UnsupportedSpec(HodgeWittError, ValueError):
    pass


class ParseError(HodgeWittError, ValueError):
    pass


class WindowError(HodgeWittError, ValueError):
    pass
