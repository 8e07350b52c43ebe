"""Exception hierarchy shared by all pmlab modules."""


class PMLabError(Exception):
    """Base class for every error raised by pmlab."""


class OverlapError(PMLabError, ValueError):
    """A matching edge is already present in the host graph."""


class Graph6Error(PMLabError, ValueError):
    """Malformed graph6 input."""


class CapExceeded(PMLabError, ValueError):
    """A configured size cap would be exceeded."""


class DomainError(PMLabError, ValueError):
    """Arguments fall outside the domain of a formula."""


class InfeasibleDegree(PMLabError, ValueError):
    """No graph with the requested degrees exists."""


class NoPerfectMatching(PMLabError, ValueError):
    """The graph has no perfect matching to sample from."""


class ZeroVariance(PMLabError, ValueError):
    pass


class DegenerateInput(PMLabError, ValueError):
    pass


class EmptyEnsemble(PMLabError, ValueError):
    pass


class EtaOutOfRange(PMLabError, ValueError):
    """Fallback probability eta is not in [0, 1)."""


class ProbabilityOverflow(PMLabError, ValueError):
    """Branch masses of a coupling step exceed one."""


class InfeasibleRegime(PMLabError):
    """Asymptotic parameters do not define a coupling (eta >= 1)."""
