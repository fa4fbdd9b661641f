"""Exception hierarchy.

``ValidationError`` subclasses mean the input does not satisfy a standing
assumption (CLI exit code 1); ``VerificationError`` subclasses mean a
computed identity failed to hold (exit code 2).
"""


class QSYZError(Exception):
    pass


class ParseError(QSYZError, ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


class ValidationError(QSYZError, ValueError):
    def __init__(self, message: str, invariant: str = "fan"):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class NotCalabiYau(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, "calabi-yau")


class AmbiguousU(ValidationError):
    """The covector u is not unique; ``particular`` + span of ``directions``."""

    def __init__(self, particular, directions):
        self.particular, self.directions = particular, directions
        super().__init__(
            f"u is not unique: {particular} + span{directions}; select one explicitly",
            "calabi-yau",
        )


class SingularCone(ValidationError):
    def __init__(self, cones):
        self.cones = cones
        super().__init__(f"non-smooth cones {cones}", "smoothness")


class EmptyInterior(ValidationError):
    def __init__(self, certificate=None):
        self.certificate = certificate
        super().__init__("moment polytope has empty interior", "polytope")


class OutsidePolytope(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, "polytope")


class GaugeConeInvalid(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, "gauge-cone")


class UnsupportedDimension(QSYZError):
    pass


class VerificationError(QSYZError):
    pass


class ConstraintViolated(VerificationError):
    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(f"constraint a={index} violated {message}".rstrip())


class NotOnLevelSet(VerificationError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"point is not on the level set (residual {residual:.3e})")


class QuadratureUnconverged(VerificationError):
    pass
