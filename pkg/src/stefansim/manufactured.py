"""
Manufactured test problems with a planted (alpha0, beta0).

With constant coefficients L = lambda and N = c rho the profiles are known in
closed form, so the latent heats that make a chosen pair (alpha0, beta0) solve
both front conditions can be computed directly.
"""
from __future__ import annotations

import math

from .exceptions import SpecError
from .kernel import frozen_phi
from .thermal import Affine, Constant, ProblemSpec


def closed_form_kernels(alpha0, beta0, nu, L1=1.0, N1=1.0, L2=1.0, N2=1.0):
    """(Phi_1[alpha0, beta0], Phi_2[beta0, inf), E_1(beta0)) for constant coefficients."""
    phi1 = frozen_phi(L1, N1, alpha0, beta0, nu)
    phi2 = frozen_phi(L2, N2, beta0, math.inf, nu)
    E1 = math.exp(-(N1 / L1) * (beta0 ** 2 - alpha0 ** 2))
    return phi1, phi2, E1


def latent_heats(alpha0, beta0, nu, theta_b, theta_m, gamma_b=1.0, gamma_m=1.0,
                 interface="stefan", L1=1.0, N1=1.0, L2=1.0, N2=1.0):
    """(l_b, l_m) making the planted pair satisfy both front conditions."""
    phi1, phi2, E1 = closed_form_kernels(alpha0, beta0, nu, L1, N1, L2, N2)
    dth = theta_b - theta_m
    u_c = -theta_m / dth
    A = 1.0 / (phi1 * alpha0 ** (nu + 1))
    jump = (E1 if interface == "stefan" else 1.0) / phi1
    B = (jump + u_c / phi2) / beta0 ** (nu + 1)
    if not (A > 0 and B > 0):
        raise SpecError(f"planted pair needs a negative latent heat (B*={B:.6g}); "
                        f"reduce |u_c| = {abs(u_c):.6g}")
    return A * dth / (2 * gamma_b), B * dth / (2 * gamma_m)


def manufactured_spec(alpha0=0.4, beta0=1.0, nu=0.5, theta_b=6.0, theta_m=1.0,
                      interface="stefan", slope=0.0):
    """Constant unit coefficients with the latent heats planted for (alpha0, beta0).

    ``slope`` replaces every coefficient by 1 + slope (theta - theta_m), a
    small affine perturbation of the same problem (the latent heats stay those
    of the unperturbed one).
    """
    l_b, l_m = latent_heats(alpha0, beta0, nu, theta_b, theta_m, interface=interface)
    if slope == 0.0:
        coeff = Constant(1.0)
    else:
        coeff = Affine(1.0 - slope * theta_m, slope)
    return ProblemSpec(nu=nu, theta_b=theta_b, theta_m=theta_m, l_b=l_b, l_m=l_m,
                       gamma_b=1.0, gamma_m=1.0, lambda1=coeff, lambda2=coeff,
                       c1=coeff, c2=coeff, rho1=Constant(1.0), rho2=Constant(1.0))
