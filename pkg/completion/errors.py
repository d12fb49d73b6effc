"""
Exception hierarchy for the completion engine
"""


class CompletionError(Exception):
    """Base class for every error raised by the engine."""

    kind = 'completion_error'

    def details(self):
        """Extra fields for machine-readable reports."""
        return {}


class NotTame(CompletionError):
    """A limit pattern outside the tame class."""

    kind = 'not_tame'


class VerificationFailure(CompletionError):
    """An internal exactness check failed (an implementation bug)."""

    kind = 'verification_failure'


class InvalidComparison(CompletionError):
    """A declared atom correspondence is not admissible."""

    kind = 'invalid_comparison'


class InvalidComplex(CompletionError):
    """Shape mismatch or d∘d != 0 in a chain complex."""

    kind = 'invalid_complex'

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree

    def details(self):
        return {'degree': self.degree}


class NoStabilization(CompletionError):
    """The tower oracle did not see a stable pattern within its stage budget."""

    kind = 'no_stabilization'

    def __init__(self, degree, stages):
        super().__init__(f"tower in degree {degree} did not stabilize within {stages} stages")
        self.degree = degree
        self.stages = stages

    def details(self):
        return {'degree': self.degree, 'stages': self.stages}


class UnresolvedExtension(CompletionError):
    """Both ends of a short exact sequence are nonzero and no split criterion applies."""

    kind = 'unresolved_extension'

    def __init__(self, degree, left, right):
        super().__init__(
            f"extension in degree {degree} is not determined: 0 -> {left} -> ? -> {right} -> 0"
        )
        self.degree = degree
        self.left = left
        self.right = right

    def details(self):
        return {'degree': self.degree, 'left': str(self.left), 'right': str(self.right)}


class ParseError(CompletionError):
    """Grammar failure with the offending position and the expected token."""

    kind = 'parse_error'

    def __init__(self, position, expected, text=''):
        snippet = text[position:position + 12] if text else ''
        found = repr(snippet) if snippet else 'end of input'
        super().__init__(f"at position {position}: expected {expected}, found {found}")
        self.position = position
        self.expected = expected

    def details(self):
        return {'position': self.position, 'expected': self.expected}
