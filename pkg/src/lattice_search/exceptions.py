"""Exception hierarchy shared by every module of the package."""


class LatticeSearchError(Exception):
    """Base class for all errors raised by lattice_search."""


class InvalidStateError(LatticeSearchError, ValueError):
    """A state vector has the wrong shape or is not normalized."""


class MalformedProblemError(LatticeSearchError, ValueError):
    """A problem instance violates its structural invariants."""


class MalformedGraphError(MalformedProblemError):
    pass


class MalformedClauseError(MalformedProblemError):
    pass


class CapExceededError(LatticeSearchError):
    """Full-lattice simulation requested above the configured size cap."""


class NoSolutionAmplitudeError(LatticeSearchError):
    """Every simulated step left zero probability in the solutions."""


class InfeasibleSpecError(LatticeSearchError, ValueError):
    """An ensemble specification cannot be realized (e.g. m > m_max)."""


class InfeasibleSearchError(LatticeSearchError):
    """A brute-force enumeration would exceed its size limit."""
