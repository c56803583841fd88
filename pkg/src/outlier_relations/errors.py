class ParameterError(ValueError):
    """A parameter is outside its legal range."""


class DataError(Exception):
    """Input data cannot support the requested computation."""


class IngestError(DataError):
    pass


class EmptyRepresentationError(DataError):
    pass


class SampleTooSmallError(DataError):
    pass


class DegenerateFitError(DataError):
    pass


class ConfigError(ValueError):
    pass
