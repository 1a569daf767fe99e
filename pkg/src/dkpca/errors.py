"""Exception hierarchy shared by every stage of the pipeline."""


class DKPCAError(Exception):
    """Base class for all errors raised by this package."""


class DatasetError(DKPCAError):
    """A dataset file is missing, empty or unusable."""


class ParseError(DatasetError):
    """A dataset or config file line could not be parsed."""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"{line_number}:"
        super().__init__(f"{where} {message}" if where else message)


class ParameterError(DKPCAError, ValueError):
    """An argument is outside its valid domain."""


class ResourceError(DKPCAError):
    """A computation would exceed a configured size cap."""


class EmptyInputError(DKPCAError, ValueError):
    pass


class DegenerateKernelError(DKPCAError):
    """The centered kernel has no strictly positive eigenvalue."""


class NumericError(DKPCAError, ArithmeticError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class ContractViolation(DKPCAError, ValueError):
    """Inputs violate a documented precondition (e.g. unknown labels)."""
