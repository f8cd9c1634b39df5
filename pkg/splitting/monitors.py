from typing import Any, Dict, Optional

import numpy as np

from asymptotics.probe import boundary_limits
from utils.data_models import Field


class SupNormMonitor:
    """Records ‖U_k‖_∞ and the componentwise range."""

    name = "sup_norm"

    def observe(self, k: int, t: float, field: Field) -> Dict[str, Any]:
        values = field.values
        record = {"step": k, "time": t, "sup_norm": field.sup_norm()}
        if not field.is_complex:
            record["min"] = float(values.min())
            record["max"] = float(values.max())
        return record


class RegionMonitor:
    """Records the worst membership margin of U_k against a region family."""

    def __init__(self, region: Any, name: str = "region"):
        self.region = region
        self.name = name

    def observe(self, k: int, t: float, field: Field) -> Dict[str, Any]:
        margins = self.region.margins(t, field.values)
        worst = int(np.argmin(margins))
        inside = bool(np.all(self.region.inside(t, field.values)))
        return {
            "step": k,
            "time": t,
            "worst_margin": float(margins.reshape(-1)[worst]),
            "worst_point_index": worst,
            "inside": inside,
        }


class BoundaryMonitor:
    """Records the left/right band means of a 1-D field (first state component)."""

    name = "boundary"

    def __init__(self, band: Optional[float] = None):
        self.band = band

    def observe(self, k: int, t: float, field: Field) -> Dict[str, Any]:
        left, right = boundary_limits(field, self.band)
        return {
            "step": k,
            "time": t,
            "left": float(np.real(left[0])),
            "right": float(np.real(right[0])),
        }
