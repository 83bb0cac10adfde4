"""Stability quadratic form of cones evaluated on cutoff probes."""

from collections.abc import Callable, Sequence
from logging import Logger

import numpy as np

from stablelab.cones.schemas import (
    ConeStabilityScan,
    CutoffProbe,
    ProbeResult,
    QuadraticForm,
    RadialConeProfile,
)
from stablelab.exceptions import DomainError
from stablelab.numerics.quadrature import quadrature
from stablelab.numerics.schemas import Mesh1D

TAIL_FACTOR = 10.0


def quadratic_form(
    profile: RadialConeProfile,
    eta: Callable[[np.ndarray], np.ndarray],
    eta_prime: Callable[[np.ndarray], np.ndarray],
    mesh: Mesh1D,
    *,
    form: QuadraticForm = "jacobi",
) -> float:
    """Return the reduced quadratic form of a radial test function.

    jacobi: int (eta'^2 - d eta^2 / r^2) r^{n-2} dr.
    simons: int (eta'^2 - 2 eta^2 / r^2) r^{n-4} dr, the form left after applying
    the Simons inequality, independent of d.

    The cross-section measure multiplies both terms and is dropped. Both forms are
    homogeneous under dilations of eta.
    """
    r = mesh.nodes
    if form == "jacobi":
        coefficient, power = profile.d, profile.n - 2
    elif form == "simons":
        coefficient, power = 2.0, profile.n - 4
    else:
        raise DomainError(f"Unknown quadratic form '{form}'")
    integrand = (eta_prime(r) ** 2 - coefficient * eta(r) ** 2 / r**2) * r**power
    return quadrature(integrand, mesh)


def probe_mesh(probe: CutoffProbe, *, nodes_per_decade: int = 400) -> Mesh1D:
    """Return a geometric mesh of [rho_in, rho_out] containing every probe kink."""
    decades = np.log10(probe.rho_out / probe.rho_in)
    nodes = np.geomspace(
        probe.rho_in, probe.rho_out, int(np.ceil(decades * nodes_per_decade)) + 1
    )
    kinks = [probe.rho_in, 2 * probe.rho_in, 1.0, probe.rho_out / 2, probe.rho_out]
    return Mesh1D(nodes=np.unique(np.concatenate([nodes, kinks])))


def in_window(n: int, alpha: float, beta: float) -> bool:
    """Return True when alpha < (n - 5) / 2 < beta and alpha^2, beta^2 < 2."""
    pivot = (n - 5) / 2
    return alpha < pivot < beta and alpha**2 < 2 and beta**2 < 2


def _probe_value(
    profile: RadialConeProfile,
    probe: CutoffProbe,
    mesh: Mesh1D | None,
    form: QuadraticForm,
    nodes_per_decade: int,
) -> float:
    if mesh is None:
        mesh = probe_mesh(probe, nodes_per_decade=nodes_per_decade)
    elif mesh.nodes[0] > probe.rho_in or mesh.nodes[-1] < probe.rho_out:
        raise DomainError(
            f"Mesh [{mesh.nodes[0]}, {mesh.nodes[-1]}] does not cover "
            f"[{probe.rho_in}, {probe.rho_out}]"
        )
    nodes = mesh.nodes
    total = 0.0
    for start, stop, eta, eta_prime in probe.pieces():
        inside = nodes[(nodes > start) & (nodes < stop)]
        ends = [start, 0.5 * (start + stop), stop]
        piece = Mesh1D(nodes=np.unique(np.concatenate([ends, inside])))
        total += quadratic_form(profile, eta, eta_prime, piece, form=form)
    return total


def cone_stability_probe(
    profile: RadialConeProfile,
    probe: CutoffProbe,
    mesh: Mesh1D | None = None,
    *,
    form: QuadraticForm = "jacobi",
    nodes_per_decade: int = 400,
) -> ProbeResult:
    """Evaluate the cone quadratic form on a cutoff probe.

    The probe is admissible when (alpha, beta) lies in the finiteness window and the
    tails are finite. A tail diverges when moving both truncation radii outwards by a
    factor 10 at least doubles a positive value. Divergence towards -inf keeps the
    probe admissible since every truncation is a valid compactly supported probe.

    Args:
        profile (RadialConeProfile): Cone profile.
        probe (CutoffProbe): Test function.
        mesh (Mesh1D | None): Mesh covering [rho_in, rho_out]. A geometric mesh with
            the probe kinks is built when None.
        form (str): "jacobi" or "simons".
        nodes_per_decade (int): Resolution of the generated meshes.

    Returns:
        ProbeResult: Form value and admissibility flags.

    Raises:
        DomainError: If the mesh does not cover the probe support.

    """
    q = _probe_value(profile, probe, mesh, form, nodes_per_decade)
    tail_finite = True
    if q > 0:
        extended = _probe_value(
            profile, probe.extended(TAIL_FACTOR), None, form, nodes_per_decade
        )
        tail_finite = extended < 2 * q
    return ProbeResult(
        alpha=probe.alpha,
        beta=probe.beta,
        rho_in=probe.rho_in,
        rho_out=probe.rho_out,
        q=q,
        in_window=in_window(profile.n, probe.alpha, probe.beta),
        tail_finite=tail_finite,
    )


def scan_cone_stability(
    profile: RadialConeProfile,
    alphas: Sequence[float],
    betas: Sequence[float],
    radii: Sequence[tuple[float, float]],
    *,
    form: QuadraticForm = "jacobi",
    nodes_per_decade: int = 400,
    logger: Logger | None = None,
) -> ConeStabilityScan:
    """Evaluate every probe of the (alpha, beta, radii) product.

    Returns:
        ConeStabilityScan: All results with the minimum over admissible probes and
            over tail-finite probes and over every probe (None when the set is
            empty).

    """
    results = [
        cone_stability_probe(
            profile,
            CutoffProbe(alpha=alpha, beta=beta, rho_in=rho_in, rho_out=rho_out),
            form=form,
            nodes_per_decade=nodes_per_decade,
        )
        for alpha in alphas
        for beta in betas
        for rho_in, rho_out in radii
    ]
    admissible = [r.q for r in results if r.admissible]
    finite = [r.q for r in results if r.tail_finite]
    if logger is not None:
        msg = (
            f"Cone stability scan n={profile.n} d={profile.d:.6g} form={form}: "
            f"{len(results)} probes, {len(admissible)} admissible"
        )
        logger.info(msg)
    return ConeStabilityScan(
        n=profile.n,
        d=profile.d,
        form=form,
        results=results,
        min_admissible_q=min(admissible) if admissible else None,
        min_tail_finite_q=min(finite) if finite else None,
        min_q=min(r.q for r in results) if results else None,
    )
