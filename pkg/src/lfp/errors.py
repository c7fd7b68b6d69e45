"""Exception types shared across the package."""


class LfpError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LfpError):
    """Syntax or well-formedness error in an input file."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}" if col is not None else f"{line}: {message}"
        super().__init__(message)


class SignatureError(LfpError):
    """Use of an undeclared relation/function, or an arity mismatch."""


class StratificationError(LfpError):
    """A program violates one of the three stratification rules.

    bullet 1: a relation is asserted in two different layers;
    bullet 2: a relation is used positively before its defining layer;
    bullet 3: a relation is used negatively at or before its defining layer.
    """

    def __init__(self, bullet: int, relation: str, use_layer: int, assert_layer: int, message: str):
        self.bullet = bullet
        self.relation = relation
        self.use_layer = use_layer
        self.assert_layer = assert_layer
        super().__init__(message)
