"""Report dictionaries shared by the command line and library callers."""

from __future__ import annotations

from typing import Optional

from . import __version__
from .errors import NotPositive
from .krt import (
    CertificationReport,
    certify_dominant,
    certify_real_cone,
    certify_split,
    extract_perron_pair,
    positivity_to_dict,
    spectrum_summary,
)
from .linalg import eigen_spectrum
from .positivity import VIOLATED, certify_positive, decomplexify
from .rng import ALGORITHM
from .serialize import Instance
from .tolerances import DEFAULT, Tolerances

CHECKS = ("dominant", "split", "real")


def _envelope(inst: Instance, tolerances: Tolerances, seed: int) -> dict:
    return {
        "input_digest": inst.digest,
        "tool_version": __version__,
        "rng": ALGORITHM,
        "seed": seed,
        "tolerances": tolerances.as_dict(),
    }


def analyze_instance(inst: Instance, tolerances: Optional[Tolerances] = None) -> dict:
    """Spectrum, positivity certificate and dominant pair of an instance."""
    tol = inst.tolerance_profile(tolerances or DEFAULT)
    seed = inst.seed or 0
    spec = eigen_spectrum(inst.matrix, tolerances=tol)
    pos = certify_positive(inst.matrix, inst.cone, tol, seed=seed)
    out = _envelope(inst, tol, seed)
    out["spectrum"] = spectrum_summary(spec)
    out["spectral_radius"] = spec.spectral_radius
    out["positivity"] = positivity_to_dict(pos)
    if pos.verdict == VIOLATED:
        out["dominant_pair"] = None
    else:
        try:
            out["dominant_pair"] = extract_perron_pair(inst.matrix, inst.cone, tol, positivity=pos).to_dict()
        except NotPositive:
            out["dominant_pair"] = None
    return out


def certify_instance(inst: Instance, check: str = "dominant", rho_fraction: Optional[float] = None,
                     tolerances: Optional[Tolerances] = None) -> tuple:
    """Run one certification path; returns ``(report dict, CertificationReport)``.

    ``rho_fraction`` is the split radius as a fraction of the spectral
    radius and is required for the split path.
    """
    tol = inst.tolerance_profile(tolerances or DEFAULT)
    seed = inst.seed or 0
    if check == "dominant":
        rep = certify_dominant(inst.matrix, inst.cone, tol, seed)
    elif check == "split":
        if rho_fraction is None:
            raise ValueError("the split check needs a split radius")
        if not 0 < rho_fraction < 1:
            raise ValueError("the split radius must be a fraction in (0, 1) of the spectral radius")
        r_sigma = eigen_spectrum(inst.matrix, tolerances=tol).spectral_radius
        rep = certify_split(inst.matrix, inst.cone, rho_fraction * r_sigma, tol, seed)
    elif check == "real":
        from .cones import Complexified

        B = decomplexify(inst.matrix, tol=1e-14)
        P = inst.cone.base if isinstance(inst.cone, Complexified) else inst.cone
        rep = certify_real_cone(B, P, tol, seed)
    else:
        raise ValueError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")
    out = _envelope(inst, tol, seed)
    out.update(rep.to_dict())
    return out, rep


def exit_status(rep: CertificationReport, strict: bool) -> int:
    if rep.any_fail:
        return 1
    if strict and rep.any_undecided:
        return 4
    return 0
