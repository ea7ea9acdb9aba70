"""
Error hierarchy for chern-fqh.

Every error carries a stable ``code`` string and the process exit code the CLI
uses when the error escapes a command.
"""


class ChernFqhError(Exception):
    """Base class for all library errors."""

    code = "internal_error"
    exit_code = 1

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "message": str(self)}


class InvalidInputError(ChernFqhError, ValueError):
    """Malformed input: asymmetric matrix, bad index set, unusable job file."""

    code = "invalid_input"
    exit_code = 2


class SingularMatrixError(InvalidInputError):
    """A determinant vanished where an inverse is required."""

    code = "singular_matrix"


class SizeGuardError(InvalidInputError):
    """The brute-force Grassmann expansion would exceed the generator guard."""

    code = "size_guard"


class RankZeroError(InvalidInputError):
    """A ratio over the rank was requested for a rank-zero configuration."""

    code = "rank_zero"


class HypothesisError(InvalidInputError):
    """A hypothesis of an asymptotic statement does not hold."""

    code = "hypothesis_violated"


class SeriesError(ChernFqhError, ValueError):
    """Invalid truncated power series operation."""

    code = "series_error"


class GrassmannError(ChernFqhError, ValueError):
    """Invalid Grassmann algebra operation."""

    code = "grassmann_error"


class ConsistencyError(ChernFqhError):
    """An internal cross-check failed; indicates a sign or bookkeeping bug."""

    code = "consistency_error"
