"""Exception hierarchy.

Every exception carries a stable machine-readable ``code`` so the CLI can
emit distinct error codes in JSON output.  Exceptions whose ``verdict``
attribute is True represent mathematical FAIL verdicts about valid input
(CLI exit status 1); the rest are usage or input problems (exit status 2).
"""


class CayleyLabError(Exception):
    code = "error"
    verdict = False


class UnsupportedWord(CayleyLabError):
    code = "unsupported-word"


class NonConfluentRules(CayleyLabError):
    code = "non-confluent-rules"


class BallTooLarge(CayleyLabError):
    code = "ball-too-large"


class TruncatedDistance(CayleyLabError):
    """The ball cannot certify the true word distance for this pair.

    ``in_ball_distance`` holds the graph distance inside the ball, which is
    only an upper bound on the group distance.
    """

    code = "truncated"

    def __init__(self, message, in_ball_distance=None):
        super().__init__(message)
        self.in_ball_distance = in_ball_distance


class TableTooShort(CayleyLabError):
    code = "table-too-short"


class RadiusTooSmall(CayleyLabError):
    code = "radius-too-small"


class DegenerateDomain(CayleyLabError):
    code = "degenerate-domain"


class NotEmbedding(CayleyLabError):
    code = "not-embedding"
    verdict = True


class NotQuasiIsometry(CayleyLabError):
    code = "not-quasi-isometry"
    verdict = True


class NotQuasiGeodesic(CayleyLabError):
    """Path violates the claimed quasi-geodesic inequality.

    ``witness`` is the violating parameter index pair (i, j).
    """

    code = "not-quasi-geodesic"
    verdict = True

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class OutOfBall(CayleyLabError):
    code = "out-of-ball"


class ActionUndefined(CayleyLabError):
    code = "action-undefined"


class MembershipUnknown(CayleyLabError):
    code = "membership-unknown"


class InvalidPath(CayleyLabError):
    code = "invalid-path"


class EmptyCorpus(CayleyLabError):
    code = "empty-corpus"


class EmptyCoset(CayleyLabError):
    code = "empty-coset"


class AxiomsNotVerified(CayleyLabError):
    code = "axioms-not-verified"


class NonUniqueProjection(CayleyLabError):
    """Two nearest points on a piece: falsifies tree-gradedness."""

    code = "non-unique-projection"
    verdict = True

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class LoopTooShort(CayleyLabError):
    code = "loop-too-short"


class LeavesCertifiedRegion(CayleyLabError):
    code = "leaves-certified-region"


class ProductsLeaveBall(CayleyLabError):
    code = "products-leave-ball"


class PresentationFormatError(CayleyLabError):
    code = "presentation-format"
