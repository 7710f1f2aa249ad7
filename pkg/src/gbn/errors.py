"""Exception and warning types shared across the package."""


class GbnError(Exception):
    """Base class for every error this package raises on purpose."""


class InputError(GbnError):
    """A file failed to parse or validate.

    Carries enough context (file, line, field) for a CLI to print an
    actionable message and exit with the input-error code.
    """

    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        parts = []
        if path is not None:
            parts.append(str(path))
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class CycleError(GbnError):
    """The edge set admits no topological order."""


class DuplicateEdgeError(GbnError):
    """The same edge was given more than once."""


class IndexOutOfRange(GbnError):
    """A node index lies outside 1..p."""


class NotTriangularError(GbnError):
    """A weight matrix has nonzero entries on or below the diagonal
    once its rows and columns are taken in topological order."""


class NonPositiveSigma(GbnError):
    """A noise standard deviation is zero or negative."""


class Unidentifiable(GbnError):
    """A node is clamped in every data row, leaving its parameters
    without any informative observations."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"node {node} has no unclamped rows; "
                                    "its parameters cannot be estimated")


class DegenerateSystem(GbnError):
    """The normal equations for one child node are singular, typically
    because the design gives no independent variation to its parents."""

    def __init__(self, node, edges=(), message=None):
        self.node = node
        self.edges = tuple(edges)
        if message is None:
            named = ", ".join(f"w[{i},{j}]" for i, j in self.edges)
            message = (f"normal equations for node {node} are degenerate; "
                       f"affected weights: {named or 'none'}")
        super().__init__(message)


class SingularScatter(GbnError):
    """The full sample scatter matrix is singular."""


class NotObservational(GbnError):
    """An operation restricted to purely observational data received
    rows carrying interventions."""


class SingularInformation(GbnError):
    """The information matrix is singular: some parameter receives no
    information from the design."""


class InsufficientReplication(GbnError):
    """A node is left with exactly one unclamped row, for which the
    profiled information term is undefined."""

    def __init__(self, node, n_rows=1):
        self.node = node
        self.n_rows = n_rows
        super().__init__(f"node {node} has {n_rows} unclamped row(s); "
                         "at least 2 are required")


class AllReplicatesFailed(GbnError):
    """Every Monte Carlo replicate failed to fit."""


class ExcessiveFailures(GbnError):
    """More than 1% of Monte Carlo replicates failed to fit."""


class ZeroVarianceWarning(UserWarning):
    """Residual degrees of freedom at a node are exhausted, so the
    fitted noise standard deviation may be exactly zero."""
