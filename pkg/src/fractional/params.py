"""
Fractional order and dimension shared by every computation.
"""
import math
from dataclasses import dataclass

from src.core.exceptions import DomainError


@dataclass(frozen=True)
class FracParams:
    """
    (alpha, d) pair. alpha = 1 is the classical Gaussian limit and is only
    evaluated through closed forms.
    """
    alpha: float
    d: int = 1

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 1:
            raise DomainError(f"Dimension d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not math.isfinite(self.alpha) or not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def is_gaussian(self) -> bool:
        return self.alpha == 1.0

    @property
    def nu(self) -> float:
        """Bessel order d/2 - 1 of the radial inversion"""
        return 0.5 * self.d - 1.0

    def require_fractional(self, operation: str):
        if self.is_gaussian:
            raise DomainError(f"{operation} requires alpha < 1")

    def require_dimension(self, operation: str, d: int):
        if self.d != d:
            raise DomainError(f"{operation} requires d = {d}, got d = {self.d}")

    def to_dict(self):
        return {"alpha": self.alpha, "d": self.d}
