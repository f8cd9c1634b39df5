"""
Time-indexed invariant regions K(t) and numerical audits of trajectories against them.
"""

from .families import (
    RegionFamily,
    BallFamily,
    IntervalFamily,
    RectangleFamily,
    PositiveMassBallFamily,
    contains,
)
from .builders import (
    ball_family_lambda,
    ball_family,
    fisher_envelopes,
    fisher_interval_family,
    RectangleCertificate,
    fhn_certificate,
    fhn_rectangle,
    fhn_rectangle_family,
    population_lambda,
    population_family,
)
from .audit import AuditReport, SnapshotAudit, audit_trajectory

__all__ = [
    'RegionFamily', 'BallFamily', 'IntervalFamily', 'RectangleFamily', 'PositiveMassBallFamily',
    'contains', 'ball_family_lambda', 'ball_family', 'fisher_envelopes', 'fisher_interval_family',
    'RectangleCertificate', 'fhn_certificate', 'fhn_rectangle', 'fhn_rectangle_family',
    'population_lambda', 'population_family', 'AuditReport', 'SnapshotAudit', 'audit_trajectory',
]
