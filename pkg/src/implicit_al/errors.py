class ContractViolation(ValueError):
    """An oracle returned something inconsistent with the declared problem."""


class ParameterError(ValueError):
    """A solver or prox parameter is outside its admissible range."""


class ProxBoundednessError(ParameterError):
    """Prox requested with a stepsize at or above the prox-boundedness threshold."""
