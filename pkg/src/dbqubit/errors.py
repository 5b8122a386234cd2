"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """Input outside the domain of an operation (bad N, bad width, ...)."""


class CodomainIncompleteError(DomainError):
    """An operator reached a state that the chosen codomain basis does not hold."""

    def __init__(self, state: int, label: str, text: str):
        self.state = state
        self.label = label
        super().__init__(f"codomain incomplete: state {text} not in basis '{label}'")


class IntegrityError(RuntimeError):
    """A verification check (brute force vs closed form, symmetry, ...) failed."""
