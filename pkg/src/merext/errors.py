"""Exception hierarchy.

Every error carries a short ``code`` used by the CLI when reporting.
"""


class MerextError(Exception):
    code = "Error"


class GeometryError(MerextError):
    code = "GeometryError"


class CurvesIntersect(GeometryError):
    code = "CurvesIntersect"


class AmbiguousNesting(GeometryError):
    code = "AmbiguousNesting"


class DegenerateCurve(GeometryError):
    code = "DegenerateCurve"


class SampleMismatch(MerextError):
    code = "SampleMismatch"


class ProbeTooClose(MerextError):
    code = "ProbeTooClose"


class NoProbes(MerextError):
    code = "NoProbes"


class EvalAtPole(MerextError):
    code = "EvalAtPole"


class InsufficientMoments(MerextError):
    code = "InsufficientMoments"


class ZeroPolynomial(MerextError):
    code = "ZeroPolynomial"


class NearZero(MerextError):
    code = "NearZero"


class Unresolved(MerextError):
    code = "Unresolved"


class AllTrialsInadmissible(MerextError):
    code = "AllTrialsInadmissible"
