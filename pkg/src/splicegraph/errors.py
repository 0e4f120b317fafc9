from __future__ import annotations


class SpliceError(Exception):
    """Base error.  ``code`` is a stable machine-readable tag such as ``CYCLE``."""

    def __init__(self, code: str, message: str = "") -> None:
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)


class ParseError(SpliceError):
    def __init__(self, code: str, message: str, line: int, col: int) -> None:
        self.line = line
        self.col = col
        super().__init__(code, f"{message} (line {line}, col {col})")


class AtomValidationError(SpliceError):
    """Raised by the atom loader; ``diagnostics`` holds (atom, field, message) triples."""

    def __init__(self, diagnostics: list[tuple[str, str, str]]) -> None:
        self.diagnostics = diagnostics
        text = "; ".join(f"{a}.{f}: {m}" for a, f, m in diagnostics)
        super().__init__("INVALID_ATOM", text)
