"""Exception types shared across the package."""


class SpectraError(Exception):
    """Base class for all domain errors raised by this package."""


class LocallyEffectiveError(SpectraError):
    """A global basis was requested from a locally effective object."""


class FiltrationError(SpectraError):
    """A filtration index rule is incompatible with the differential."""


class UnboundedFiltrationError(SpectraError):
    """A computation needs filtration bounds that are not available."""


class NeedsEffectiveHomologyError(SpectraError):
    """A locally effective complex has no attached equivalence."""


class UnknownScenarioError(SpectraError):
    """Scenario name not present in the registry."""


class MalformedFileError(SpectraError):
    """A filtered-complex file failed validation."""


class ArityError(SpectraError):
    """Coordinate list length does not match the page's generator count."""
