import typing as tp


class GeomBPError(Exception):
    pass


class InstanceError(GeomBPError):
    """Invalid or unparseable instance data."""

    def __init__(self, msg: str, line: tp.Optional[int] = None) -> None:
        super().__init__(msg)
        self.line = line


class PatternError(GeomBPError):
    pass


class SimplexError(GeomBPError):
    pass


class FormatVersionError(GeomBPError):
    pass
