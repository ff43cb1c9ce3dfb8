"""Warped-product critical metrics: profile construction, boundary matching,
curvature verification and Dirichlet spectral checks."""

from ._warpcrit import (
    OdeParams,
    Profile,
    RadialSolution,
    WarpcritError,
    build_example1,
    build_example2,
    classify_roots,
    critical_C0,
    first_dirichlet_eigenvalue,
    improper_integral,
    integrate_r,
    integrate_r_from_kappa,
    match_boundary,
    schwarzschild_form,
    solve_lambda,
    space_form_profile,
    verify_conformally_flat,
    verify_critical,
    verify_prop36,
    warped_hyperbolic_profile,
)

__all__ = [
    "OdeParams",
    "Profile",
    "RadialSolution",
    "WarpcritError",
    "build_example1",
    "build_example2",
    "classify_roots",
    "critical_C0",
    "first_dirichlet_eigenvalue",
    "improper_integral",
    "integrate_r",
    "integrate_r_from_kappa",
    "match_boundary",
    "schwarzschild_form",
    "solve_lambda",
    "space_form_profile",
    "verify_conformally_flat",
    "verify_critical",
    "verify_prop36",
    "warped_hyperbolic_profile",
]
