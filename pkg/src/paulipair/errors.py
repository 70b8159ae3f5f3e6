"""Exception types shared across the pipeline."""


class PauliPairError(Exception):
    """Base class for all package errors."""


class MissingLabelColumn(PauliPairError):
    def __init__(self, column, available):
        super().__init__(f"label column {column!r} not found; columns: {list(available)}")
        self.column = column


class NonNumericFeature(PauliPairError):
    def __init__(self, row, column, value):
        super().__init__(f"non-numeric value {value!r} in column {column!r} at data row {row}")
        self.row = row
        self.column = column


class EmptyDataset(PauliPairError):
    pass


class ClassTooSmall(PauliPairError):
    def __init__(self, class_name, count):
        super().__init__(f"class {class_name!r} has {count} sample(s); at least 2 required")
        self.class_name = class_name
        self.count = count


class DegenerateCovariance(PauliPairError):
    pass


class DimensionMismatch(PauliPairError):
    pass


class SingleClass(PauliPairError):
    pass


class ColumnMismatch(PauliPairError):
    pass


class EmptyTestSet(PauliPairError):
    pass


class BudgetTooSmall(PauliPairError):
    def __init__(self, budget, groups):
        super().__init__(f"shot budget {budget} is below the group count {groups}")
        self.budget = budget
        self.groups = groups


class ConfigError(PauliPairError):
    """Raised with the full list of violated config fields."""

    def __init__(self, violations):
        super().__init__("invalid configuration:\n  " + "\n  ".join(violations))
        self.violations = list(violations)
