"""Exception types shared across the package."""


class OddFormsError(Exception):
    """Base class for all package errors."""


class SystemSyntaxError(OddFormsError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class HomogeneityError(OddFormsError, ValueError):
    pass


class DimensionError(OddFormsError, ValueError):
    pass


class EvenDegreeError(OddFormsError, ValueError):
    pass


class CapExceeded(OddFormsError):
    """An exhaustive enumeration would exceed its configured cap."""


class NoSolutionFound(OddFormsError):
    def __init__(self, message, exhaustive=False):
        super().__init__(message)
        self.exhaustive = exhaustive


class VerificationError(OddFormsError):
    pass
