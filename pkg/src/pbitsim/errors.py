"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A machine, network or scenario is structurally invalid."""


class CapacityError(ValueError):
    """A request exceeds an enumeration or representation limit."""


class VerificationError(Exception):
    """A gate Hamiltonian failed its ground-state check.

    ``offending_states`` carries the bipolar states (as bit tuples over all
    spins) that break the check, for diagnosis.
    """

    def __init__(self, message, offending_states=None):
        super().__init__(message)
        self.offending_states = list(offending_states or [])


class SynthesisError(Exception):
    """No coupling matrix was found within the search budget."""
