"""Exception hierarchy shared by all fprakit modules."""


class FprakitError(Exception):
    """Base class for every error raised by this package."""


class InvalidPath(FprakitError):
    pass


class BadLambda(FprakitError):
    pass


class Infeasible(FprakitError):
    pass


class Unbounded(FprakitError):
    pass


class TooLarge(FprakitError):
    pass


class CyclicSupport(FprakitError):
    pass


class FaceViolation(FprakitError):
    pass


class NoSolutionInBody(FprakitError):
    """No candidate rounding lies in the error body.

    ``enumeration`` holds every candidate that was examined together with its
    load vector, so the claim can be re-checked independently.
    """

    def __init__(self, message, enumeration=(), context=None):
        super().__init__(message)
        self.enumeration = list(enumeration)
        self.context = dict(context or {})


class CertificateViolation(FprakitError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NotParallel(FprakitError):
    pass


class NotCrossing(FprakitError):
    pass


class OneSidedViolated(FprakitError):
    pass


class ZeroDmax(FprakitError):
    pass


class ParseError(FprakitError):
    pass


class IndexMismatch(FprakitError):
    pass


class UnsatisfiableParams(FprakitError):
    pass
