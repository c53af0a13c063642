"""Exception types. Each carries the short error code used in reports."""


class HQMError(ValueError):
    code = "error"


class DimensionError(HQMError):
    code = "dimension"


class NormError(HQMError):
    code = "norm"


class EtaMismatchError(HQMError):
    code = "eta-mismatch"


class BoundaryError(HQMError):
    code = "boundary"


class DomainError(HQMError):
    code = "domain"


class ResolutionError(HQMError):
    code = "resolution"


class SupportError(HQMError):
    code = "support"
