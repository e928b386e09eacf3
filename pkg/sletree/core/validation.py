"""Error codes, structured responses and parameter validators.

Shared by the CLI commands and the verification suites.
"""

import math
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from sletree.core.errors import (
    DegenerateDelta,
    Disconnected,
    InadmissibleParams,
    InvalidSkewCombo,
    NoDegreeTwoBoundaryVertex,
    NotSimplyConnected,
    OutOfRange,
    SletreeError,
    TooLarge,
)

SEED_LIMIT = 2**64


class ErrorCode(Enum):
    """Structured error codes for JSON output."""

    VALIDATION_ERROR = "validation_error"  # Bad input
    DOMAIN_ERROR = "domain_error"  # Input outside the model's domain
    TOO_LARGE = "too_large"  # Exact computation refused
    VERIFICATION_FAILED = "verification_failed"  # A check did not pass
    SYSTEM_ERROR = "system_error"  # Infrastructure issue


def error_response(
    code: ErrorCode,
    message: str,
    details: Optional[Dict[str, Any]] = None,
    hint: Optional[str] = None,
) -> Dict[str, Any]:
    """Build a structured error response.

    Args:
        code: Error code enum value
        message: Human-readable error message
        details: Optional additional details
        hint: Optional hint for resolving the error

    Returns:
        Structured error response dictionary
    """
    response: Dict[str, Any] = {
        "success": False,
        "error_code": code.value,
        "error": message,
    }
    if details:
        response["details"] = details
    if hint:
        response["hint"] = hint
    return response


_DOMAIN = (
    NotSimplyConnected,
    Disconnected,
    NoDegreeTwoBoundaryVertex,
    OutOfRange,
    DegenerateDelta,
    InvalidSkewCombo,
    InadmissibleParams,
)


def error_code_for(exc: BaseException) -> ErrorCode:
    if isinstance(exc, TooLarge):
        return ErrorCode.TOO_LARGE
    if isinstance(exc, _DOMAIN):
        return ErrorCode.DOMAIN_ERROR
    if isinstance(exc, (ValidationError, SletreeError, ValueError)):
        return ErrorCode.VALIDATION_ERROR
    return ErrorCode.SYSTEM_ERROR


def validate_seed(seed: Any) -> Tuple[bool, Optional[str]]:
    """Seeds are integers in ``[0, 2**64)``.

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        value = int(seed)
    except (TypeError, ValueError):
        return False, f"seed must be an integer, got {seed!r}"
    if isinstance(seed, float) and not seed.is_integer():
        return False, f"seed must be an integer, got {seed!r}"
    if not 0 <= value < SEED_LIMIT:
        return False, f"seed must lie in [0, 2**64), got {value}"
    return True, None


def validate_beta(beta: float) -> Tuple[bool, Optional[str]]:
    if not -1.0 <= beta <= 1.0:
        return False, f"beta must lie in [-1, 1], got {beta}"
    return True, None


def validate_kappa(
    kappa: float, low: float = 0.0, high: float = math.inf
) -> Tuple[bool, Optional[str]]:
    """``kappa`` must be finite and inside the open interval ``(low, high)``.

    With the default bounds only ``kappa >= 0`` is required.
    """
    if not math.isfinite(kappa):
        return False, f"kappa must be finite, got {kappa}"
    if low == 0.0 and high == math.inf:
        return (True, None) if kappa >= 0 else (False, f"kappa must be >= 0, got {kappa}")
    if not low < kappa < high:
        return False, f"kappa must lie in ({low:g}, {high:g}), got {kappa}"
    return True, None


def validate_positive(name: str, value: float) -> Tuple[bool, Optional[str]]:
    if not (math.isfinite(value) and value > 0):
        return False, f"{name} must be positive, got {value}"
    return True, None


__all__ = [
    "ErrorCode",
    "SEED_LIMIT",
    "error_response",
    "error_code_for",
    "validate_seed",
    "validate_beta",
    "validate_kappa",
    "validate_positive",
]
