"""Exception hierarchy for parlens.

Validation errors (bad input) map to CLI exit code 1, runtime failures
to exit code 2.
"""


class ParlensError(Exception):
    """Base class for every error raised by parlens."""

    exit_code = 2


class ValidationError(ParlensError):
    exit_code = 1


class RuntimeFailure(ParlensError):
    exit_code = 2


# Layouts

class EmptyLayout(ValidationError):
    def __init__(self):
        super().__init__("layout text is empty")


class RaggedGrid(ValidationError):
    def __init__(self, row: int, expected: int, found: int):
        self.row = row
        self.expected = expected
        self.found = found
        super().__init__(f"row {row} has {found} cells, expected {expected}")


class UnknownCell(ValidationError):
    def __init__(self, char: str, row: int, col: int):
        self.char = char
        self.row = row
        self.col = col
        super().__init__(f"unknown cell {char!r} at row {row}, col {col}")


class NoFloor(ValidationError):
    def __init__(self):
        super().__init__("layout has no floor cell")


class UnreachableWorkstation(ValidationError):
    def __init__(self, coord: tuple):
        self.coord = coord
        super().__init__(f"workstation at {coord} has no adjacent floor cell")


class InvalidHeader(ValidationError):
    def __init__(self, line: str):
        self.line = line
        super().__init__(f"malformed layout header: {line!r}")


# Graphs and tasks

class UnknownNode(ValidationError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"node {node} is not in the layout graph")


class Unreachable(ValidationError):
    def __init__(self, source, target, subtask: str = None):
        self.source = source
        self.target = target
        self.subtask = subtask
        where = f" (subtask {subtask!r})" if subtask else ""
        super().__init__(f"{target} is unreachable from {source}{where}")


class MissingWorkstation(ValidationError):
    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"layout has no {kind!r} workstation")


class EmptyRecipe(ValidationError):
    def __init__(self, reason: str = "recipe has no subtasks"):
        super().__init__(reason)


class InvalidTaskGraph(ValidationError):
    pass


class InvalidTeamSize(ValidationError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"team size must be >= 1, got {n}")


class DomainError(ValidationError):
    def __init__(self, name: str, value):
        self.name = name
        self.value = value
        super().__init__(f"{name}={value} is outside the valid domain")


# Specialization

class EmptyTrajectory(ValidationError):
    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"agent {agent!r} has no logged steps")


class InvalidDiscount(ValidationError):
    def __init__(self, gamma):
        self.gamma = gamma
        super().__init__(f"discount must lie in [0, 1), got {gamma}")


class AlphabetMismatch(ValidationError):
    def __init__(self):
        super().__init__("distributions do not share one ordered action alphabet")


class TooFewDistributions(ValidationError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"need at least 2 distributions, got {count}")


class ZeroCounts(ValidationError):
    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"agent {agent} has no counted actions")


# Simulator and learners

class InvalidConfig(ValidationError):
    pass


class InvalidAssignment(ValidationError):
    pass


class StateSpaceTooLarge(ValidationError):
    def __init__(self, states: int, limit: int):
        self.states = states
        self.limit = limit
        super().__init__(f"{states} tabular states exceed the limit of {limit}")


class Deadlock(RuntimeFailure):
    def __init__(self, snapshot: dict):
        self.snapshot = snapshot
        super().__init__(
            f"simulation stalled at t={snapshot.get('time')} with "
            f"{snapshot.get('jobs_done')}/{snapshot.get('jobs')} jobs done")


# Statistics and files

class DegenerateInput(ValidationError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"{name} has zero variance")


class SingleClass(ValidationError):
    def __init__(self, label=None, reason: str = None):
        self.label = label
        super().__init__(reason or f"labels contain a single class ({label})")


class NonFiniteFeatures(ValidationError):
    def __init__(self):
        super().__init__("features contain NaN or infinite values")


class DimensionMismatch(ValidationError):
    def __init__(self, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected} features, got {found}")


class MissingColumn(ValidationError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} not found")


class SchemaMismatch(ValidationError):
    def __init__(self, found):
        self.found = found
        super().__init__(f"unsupported CSV schema {found}")
