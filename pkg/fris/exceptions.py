class FrisException(Exception):
    pass


class DomainError(FrisException, ValueError):
    pass


class NotPositiveSemidefiniteError(FrisException):
    pass


class SingularMatrixError(FrisException):
    pass


class InfeasiblePmfError(FrisException):
    pass


class InfeasibleConfigurationError(FrisException):
    """Raised when N_hat exceeds N or a selection does not match its budget"""
    pass


class ConfigurationError(FrisException):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class OutputError(FrisException):
    pass
