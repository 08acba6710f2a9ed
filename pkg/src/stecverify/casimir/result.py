import enum
from dataclasses import dataclass, field


class Scheme(enum.Enum):
    CUTOFF = "Cutoff"
    ZETA = "Zeta"
    ABEL_PLANA = "AbelPlana"


@dataclass(frozen=True)
class VacuumEnergyResult:
    """alpha is the primary output; E_v follows from it and R.

    For a slab ``per_area`` is set and E_v is the energy per unit plate
    area, alpha * hbar c / R**3.
    """

    alpha: float
    R: float
    scheme: Scheme
    error_estimate: float
    per_area: bool = False
    details: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def E_v(self):
        return self.alpha / self.R**3 if self.per_area else self.alpha / self.R

    def in_typical_range(self, lo=1e-4, hi=1e-1):
        """Informational: does |alpha| fall in the commonly observed window."""
        return lo <= abs(self.alpha) <= hi
