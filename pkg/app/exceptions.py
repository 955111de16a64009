class CausalSwitchError(Exception):
    """Base exception for all causal-switch errors"""


class ArgumentError(CausalSwitchError):
    """Raised when an argument lies outside its allowed domain"""


class StateValidationError(CausalSwitchError):
    """Raised when a matrix is not a valid density matrix within tolerance"""


class InternalError(CausalSwitchError):
    """Raised when a computed state violates physicality beyond tolerance"""


class ParseError(CausalSwitchError):
    """Raised when a measurement or sweep file cannot be parsed"""

    def __init__(self, message: str, row: int = None):
        self.message = message
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)
