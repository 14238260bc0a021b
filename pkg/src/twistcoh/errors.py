"""Exception hierarchy.  CLI exit codes hang off these classes."""


class TwistcohError(Exception):
    exit_code = 4


class ValidationError(TwistcohError):
    """Structure data violates an axiom; carries a report or witness."""

    exit_code = 1

    def __init__(self, message, report=None, witness=None):
        super().__init__(message)
        self.report = report
        self.witness = witness


class NotPoissonError(ValidationError):
    def __init__(self, trivector):
        super().__init__(f"not Poisson: [pi, pi] = {trivector}", witness=trivector)
        self.trivector = trivector


class WindowOverflowError(TwistcohError):
    exit_code = 3


class InvariantViolation(TwistcohError):
    """Internal consistency check failed; always a bug."""

    exit_code = 4


class ParseError(TwistcohError):
    """Malformed model or form file; ``line`` and ``col`` are 1-based."""

    exit_code = 2

    def __init__(self, message, line=None, col=None, path=None):
        self.message, self.line, self.col, self.path = message, line, col, path
        super().__init__(self._text())

    def _text(self):
        where = self.path or "<input>"
        if self.line is not None:
            where += f":{self.line}"
            if self.col is not None:
                where += f":{self.col}"
        return f"{where}: {self.message}"

    def with_path(self, path):
        self.path = path
        self.args = (self._text(),)
        return self
