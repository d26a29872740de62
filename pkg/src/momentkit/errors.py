"""Exception hierarchy shared by all momentkit modules.

Two broad families:

* contract violations (wrong shapes, truncation overflow, malformed input)
* numerical verdicts (a matrix that must be PSD is not, a rank profile is
  not flat, a kernel containment fails) -- these are *results*, reported as
  typed errors so callers can map them to exit codes.
"""


class MomentkitError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(MomentkitError):
    """Operands live on spaces of different dimensions."""


class DegreeOverflow(MomentkitError):
    """An algebra or moment operation exceeds the stored truncation degree."""


class NotHomogeneous(MomentkitError):
    """An element expected to be homogeneous has mixed degrees."""


class KernelNotContained(MomentkitError):
    """ker(q) is not contained in ker(p); the relative trace is infinite."""


class NotContinuous(MomentkitError):
    """A functional has a component on the kernel of the reference form."""


class SingularForm(MomentkitError):
    """A form required to have trivial kernel is degenerate."""


class ZeroNormDirection(MomentkitError):
    """A direction that must have positive seminorm has norm zero."""


class NotPSD(MomentkitError):
    """A matrix that certifies positivity has an eigenvalue below tolerance."""


class NotSquarePositive(MomentkitError):
    """A functional fails positivity on squares (moment matrix not PSD)."""


class NegativeEvenMoment(MomentkitError):
    """An even moment L(v^{2n}) is negative; the functional is not positive."""


class RankNotFlat(MomentkitError):
    """Truncated moment data admits no flat extraction; needs an extension."""


class IllConditioned(MomentkitError):
    """A basis extraction or linear solve exceeds the condition-number cap."""


class InfiniteTrace(MomentkitError):
    """A finite trace was required but tr(p/q) is infinite."""


class NotSubset(MomentkitError):
    """Coordinate index sets are not nested as required."""


class NotInScope(MomentkitError):
    """The hypothesis of the statement under test does not hold for the input."""


class HypothesisUnverifiable(MomentkitError):
    """The sufficient certificate for a lemma hypothesis failed; the
    conclusion is reported but not asserted."""


class HypothesisNotCertified(MomentkitError):
    """A downstream check requires a certificate that was not established."""


class KernelIssue(MomentkitError):
    """A supported character is nonzero on a kernel direction of the form."""


class IncompleteSystem(MomentkitError):
    """An orthonormal system required to be complete does not span the quotient."""


class ConfigError(MomentkitError):
    """A scenario configuration is malformed (schema or IO problem)."""
