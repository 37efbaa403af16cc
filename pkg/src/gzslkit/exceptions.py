"""Error types raised by gzslkit.

Everything derives from :class:`GzslError` (itself a ``ValueError``) so the
CLI can map any data problem to a single exit code.
"""


class GzslError(ValueError):
    """Base class for all data and numerical errors."""


class DatasetError(GzslError):
    pass


class LabelOutOfRange(DatasetError):
    def __init__(self, index, label, n_classes):
        self.index, self.label, self.n_classes = index, label, n_classes
        super().__init__(f"label {label} at index {index} is outside [0, {n_classes})")


class LabelCountMismatch(LabelOutOfRange):
    def __init__(self, n_labels, n_rows):
        self.n_labels, self.n_rows = n_labels, n_rows
        GzslError.__init__(self, f"{n_labels} labels for {n_rows} feature rows")


class NonFiniteValue(DatasetError):
    def __init__(self, array_name, index):
        self.array_name, self.index = array_name, index
        super().__init__(f"non-finite value in {array_name} at index {index}")


class EmptyDataset(DatasetError):
    def __init__(self, what):
        self.what = what
        super().__init__(f"dataset is empty or degenerate: {what}")


class ZeroPrototype(GzslError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"prototype row {row} has zero norm")


class NotEnoughClasses(GzslError):
    pass


class EmptyPool(GzslError):
    def __init__(self, cls, pool):
        self.cls, self.pool = cls, pool
        super().__init__(f"class {cls} has no samples left for the {pool} pool")


class SingularSystem(GzslError):
    pass


class DivergedLoss(GzslError):
    pass


class EmptyInput(GzslError):
    pass


class EmptyClass(GzslError):
    def __init__(self, cls):
        self.cls = cls
        super().__init__(f"class {cls} has no samples")


class ShapeMismatch(GzslError):
    pass


class NoSeenClass(GzslError):
    pass


class NoUnseenClass(GzslError):
    pass


class FormatError(GzslError):
    pass


class BadMagic(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class NonNumericCell(FormatError):
    def __init__(self, line, col, text):
        self.line, self.col = line, col
        super().__init__(f"non-numeric cell {text!r} at line {line}, column {col}")


class MissingFile(FormatError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"missing file: {path}")
