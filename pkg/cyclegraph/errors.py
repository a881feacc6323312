"""Exception hierarchy shared by all cyclegraph modules."""

from typing import Optional


class CycleGraphError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(CycleGraphError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class GeometryError(CycleGraphError):
    pass


class DatasetError(CycleGraphError):
    pass


class DatasetParseError(DatasetError):
    """Malformed dataset or potentials file; names the field and the 1-based line."""

    def __init__(self, field: str, line: int, message: str):
        self.field = field
        self.line = line
        super().__init__(f"line {line}, field '{field}': {message}")


class DatasetValidationError(DatasetParseError):
    pass


class OverflowGuardError(CycleGraphError):
    def __init__(self, growth: float, budget: float):
        self.growth = growth
        self.budget = budget
        super().__init__(
            f"|Im rho|*T = {growth:.6g} exceeds the overflow budget {budget:.6g}"
        )


class DataInconsistencyError(CycleGraphError):
    pass


class ContourTooLowError(CycleGraphError):
    def __init__(self, node: int, value: float, floor: float):
        self.node = node
        super().__init__(
            f"contour too low: |Delta| = {value:.3e} < {floor:.3e} at node {node}"
        )


class IllConditionedError(CycleGraphError):
    def __init__(self, condition: float, limit: float, where: str = ""):
        self.condition = condition
        suffix = f" ({where})" if where else ""
        super().__init__(
            f"perturbation too large for local regime: cond(I+F) = {condition:.3e} > {limit:.1e}{suffix}"
        )


class NodeCollisionError(CycleGraphError):
    def __init__(self, node: int, value: float):
        self.node = node
        super().__init__(
            f"node collides with pendant Dirichlet zero: |E| = {value:.3e} at node {node}"
        )


class NotRealizableError(CycleGraphError):
    def __init__(self, n: int, d_value: float):
        self.n = n
        super().__init__(f"data not realizable: d(lambda_{n})^2 = {d_value ** 2:.6g} < 4")


class InconsistentNormingError(CycleGraphError):
    def __init__(self, n: int, alpha: float):
        self.n = n
        super().__init__(f"inconsistent norming constant at n = {n}: alpha = {alpha:.6g}")


class RootFindingError(CycleGraphError):
    def __init__(self, n: int, message: str):
        self.n = n
        super().__init__(f"eigenvalue {n}: {message}")


class SignFlipError(CycleGraphError):
    def __init__(self, epsilon: float, indices):
        self.indices = list(indices)
        super().__init__(
            f"epsilon {epsilon:g} too large for sign preservation (sigma changed at n = {self.indices[:5]})"
        )


class InversionFailedError(CycleGraphError):
    def __init__(self, step: str, message: str, hint: Optional[str] = None):
        self.step = step
        self.hint = hint
        text = f"[{step}] {message}"
        if hint:
            text += f" (hint: {hint})"
        super().__init__(text)
