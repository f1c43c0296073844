"""
Error type shared by every stability computation.
"""
from typing import Dict


class StabilityError(Exception):
    """Raised when an input or a computation leaves the supported domain.

    ``code`` is a stable machine-readable identifier (``ZeroCharacter``,
    ``DenominatorViolation``, ...); ``message`` is meant for people.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message

    def as_dict(self) -> Dict[str, Dict[str, str]]:
        """Render the error the way the CLI reports it."""
        return {'error': {'code': self.code, 'message': self.message}}


def usage_error(message: str) -> StabilityError:
    return StabilityError('UsageError', message)
