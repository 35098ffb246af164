"""Exception hierarchy shared by every steinlab module."""


class SteinlabError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 4


class InputError(SteinlabError, ValueError):
    exit_code = 2


class NotUnimodular(InputError):
    pass


class ZeroCoordinate(InputError):
    pass


class ZeroConstantTerm(InputError):
    pass


class DegenerateDegreeZero(InputError):
    pass


class DegreeTooLarge(InputError):
    pass


class NonUnitConstantTerm(InputError):
    pass


class NonPositiveMargin(InputError):
    pass


class OutsideStrip(InputError):
    pass


class SpectrumShapeMismatch(InputError):
    pass


class HypothesisViolated(InputError):
    pass


class OutOfRange(InputError):
    """A point image is not representable in double precision; work with log-moduli instead."""


class SchemaViolation(SteinlabError):
    pass


class CertificationFailed(SteinlabError):
    pass


class IllConditionedFrame(CertificationFailed):
    pass


class RankDeficient(CertificationFailed):
    pass


class MembershipFailure(CertificationFailed):
    pass


class TailNotCertifiable(CertificationFailed):
    pass


class AliasingSuspected(CertificationFailed):
    pass


class SearchFailed(CertificationFailed):
    pass


class NonConvergedSolve(CertificationFailed):
    pass
