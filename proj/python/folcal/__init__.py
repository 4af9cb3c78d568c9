"""Calibrations and foliation volumes on round spheres.

Thin wrapper over the C++ core: exact exterior-algebra identities, comass
maximization over decomposable tangent planes, and Gauss-section volumes of
Hopf and north-south foliations. Records come back as plain dicts.
"""

import json

from . import _folcal
from ._folcal import (
    __version__,
    case_ids,
    differential_text,
    evaluate_plane,
    evaluation_table,
    form_text,
    gauss_jacobian,
    leaf_tangent,
    sphere_volume,
)

__all__ = [
    "__version__",
    "case_ids",
    "comass",
    "differential_text",
    "evaluate_plane",
    "evaluation_table",
    "form_text",
    "gauss_jacobian",
    "leaf_tangent",
    "mixed_scan",
    "orthogonality",
    "sphere_volume",
    "verify",
    "volume",
    "volume_ratio",
]


def verify(case_id, workers=1):
    return json.loads(_folcal.verify_json(case_id, workers))


def orthogonality(k, n, method="direct"):
    return json.loads(_folcal.orthogonality_json(k, n, method))


def comass(form, k, n, restarts=64, seed=1, tol=1e-10, workers=1):
    return json.loads(_folcal.comass_json(form, k, n, restarts, seed, tol, workers))


def mixed_scan(grid=9, comass_constant=1.0):
    return json.loads(_folcal.mixed_scan_json(grid, comass_constant))


def volume(model, method="profile", nodes=48, samples=200000, eps=(1e-2, 1e-3, 1e-4, 1e-5), seed=1, h=1e-5, workers=1):
    return json.loads(_folcal.volume_json(model, method, nodes, int(samples), list(eps), seed, h, workers))


def volume_ratio(a, b, method="profile", nodes=48, samples=200000, seed=1, workers=1):
    return json.loads(_folcal.ratio_json(a, b, method, nodes, int(samples), seed, workers))
