"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class EmptyPathError(DomainError):
    """Source and destination coincide, so there is no arc to route."""


class IncompleteAssignment(ValueError):
    """A step still has transfers without a wavelength."""


class WavelengthExhausted(RuntimeError):
    """First-fit needed a wavelength index at or above the available count.

    Attributes:
        transfer: the transfer that could not be placed.
        link_load: wavelengths already busy on the most loaded link of its arc.
        step_index: index of the step being assigned, when known.
    """

    def __init__(self, transfer, link_load: int, n_wavelengths: int, step_index=None):
        self.transfer = transfer
        self.link_load = link_load
        self.n_wavelengths = n_wavelengths
        self.step_index = step_index
        where = "" if step_index is None else f" in step {step_index}"
        super().__init__(
            f"no free wavelength for {transfer.src}->{transfer.dst} "
            f"({transfer.direction.name.lower()}){where}: link load {link_load}, "
            f"w={n_wavelengths}"
        )
