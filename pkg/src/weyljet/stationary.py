"""Formal stationary phase: Legendre transforms, Gaussian moments and the
fiber-integration engine shared by the Fourier/transition machinery.

Conventions, fixed once for the whole package:

* kernel normalization ``(2 pi h)^{-m/2} Int exp(i x.xi / h) dx``;
* the Gaussian constant for a real nondegenerate Hessian ``Q`` is
  ``exp(i pi sgn(Q)/4) |det Q|^{-1/2}``, equivalently ``det(-iQ)^{-1/2}``
  on the branch ``sqrt(r e^{i phi}) = sqrt(r) e^{i phi/2}``, -pi < phi < pi;
  for complex symmetric ``Q`` with ``det(-iQ)`` away from the cut the same
  formula is taken through principal eigenvalue logarithms.

The real branch is the delta -> 0+ limit of the complex one, so the two
regimes agree on overlaps.
"""

from __future__ import annotations

import cmath
import math
from typing import Mapping, Sequence

import numpy as np

from .series import SeriesContext, SeriesError, TruncatedSeries, compose

HBAR = "h"


class DegenerateHessianError(SeriesError):
    pass


# --- Gaussian moments --------------------------------------------------------


def _pairing_sum(indices: tuple[int, ...], P: np.ndarray,
                 cache: dict) -> complex:
    if not indices:
        return 1.0 + 0.0j
    if indices in cache:
        return cache[indices]
    i0 = indices[0]
    rest = indices[1:]
    total = 0.0 + 0.0j
    for pos in range(len(rest)):
        j = rest[pos]
        sub = rest[:pos] + rest[pos + 1:]
        total += P[i0, j] * _pairing_sum(sub, P, cache)
    cache[indices] = total
    return total


def gaussian_moment(Q, alpha: Sequence[int]) -> tuple[complex, int]:
    """Normalized moment ``<z^alpha>`` for the weight ``exp(i Q z^2 / 2h)``.

    Returns ``(coefficient, hbar_power)`` where the moment equals
    ``coefficient * h**hbar_power``; odd total degree gives zero.  The
    propagator of a single pairing is ``i h (Q^{-1})_{jk}``.
    """
    alpha = [int(a) for a in alpha]
    order = sum(alpha)
    if order % 2 == 1:
        return 0.0 + 0.0j, 0
    if order == 0:
        return 1.0 + 0.0j, 0
    Qm = np.asarray(Q, dtype=complex)
    n = Qm.shape[0]
    if abs(np.linalg.det(Qm)) < 1e-300:
        raise DegenerateHessianError("singular quadratic form")
    P = 1j * np.linalg.inv(Qm)
    idx = []
    for j in range(n):
        idx.extend([j] * alpha[j])
    coeff = _pairing_sum(tuple(idx), P, {})
    return coeff, order // 2


def pairing_count(order: int) -> int:
    """(order-1)!! perfect pairing count, for cross-checks."""
    if order % 2:
        return 0
    out = 1
    for k in range(order - 1, 0, -2):
        out *= k
    return out


# --- prefactor branches ------------------------------------------------------


def hessian_matrix(F: TruncatedSeries, variables: Sequence[str]) -> np.ndarray:
    """Second-derivative matrix of the quadratic-in-``variables`` part of
    ``F`` with every other variable set to zero."""
    n = len(variables)
    Q = np.zeros((n, n), dtype=complex)
    for i, vi in enumerate(variables):
        Q[i, i] = 2.0 * F.coefficient({vi: 2})
        for j in range(i + 1, n):
            c = F.coefficient({vi: 1, variables[j]: 1})
            Q[i, j] = c
            Q[j, i] = c
    return Q


def real_signature(Q: np.ndarray, eps: float = 1e-9) -> int:
    vals = np.linalg.eigvalsh(Q.real)
    scale = max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    if any(abs(v) <= eps * scale for v in vals):
        raise DegenerateHessianError("degenerate Hessian")
    return int(np.sum(vals > 0) - np.sum(vals < 0))


def gaussian_prefactor(Q, eps: float = 1e-9) -> complex:
    """``det(-iQ)^{-1/2}`` on the pinned branch.

    Real symmetric input reduces to ``exp(i pi sgn(Q)/4) |det Q|^{-1/2}``
    which keeps the eighth-root phase exact.
    """
    Qm = np.asarray(Q, dtype=complex)
    n = Qm.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if float(np.max(np.abs(Qm.imag))) <= eps:
        sig = real_signature(Qm, eps)
        det = abs(np.linalg.det(Qm.real))
        return cmath.exp(1j * math.pi * sig / 4.0) / math.sqrt(det)
    lam = np.linalg.eigvals(-1j * Qm)
    if any(l.real <= 0 and abs(l.imag) <= eps for l in lam):
        raise DegenerateHessianError("Hessian branch point on the cut")
    return complex(np.exp(-0.5 * np.sum(np.log(lam))))


# --- the fiber engine --------------------------------------------------------


def quadratic_series(ctx: SeriesContext, Q, variables: Sequence[str]) -> TruncatedSeries:
    """Build ``(1/2) z.Qz`` as a series over the named variables."""
    out = ctx.zero()
    n = len(variables)
    for i in range(n):
        for j in range(i, n):
            c = Q[i][j] if not isinstance(Q, np.ndarray) else Q[i, j]
            c = complex(c) if i != j else complex(c) / 2.0
            if abs(c) > ctx.eps:
                mono = {variables[i]: 2} if i == j else {variables[i]: 1, variables[j]: 1}
                out = out + ctx.monomial(mono, c)
    return out


def fiber_stationary_phase(phase: TruncatedSeries, amplitude: TruncatedSeries,
                           z_vars: Sequence[str]):
    """Integrate ``exp(i phase / h) * amplitude`` over the ``z_vars`` block.

    ``phase`` must vanish to second order in ``z`` at the origin of the
    remaining (parameter) variables, with nondegenerate ``z``-Hessian; all
    parameter variables must carry positive weight.  Returns
    ``(reduced_phase, prefactor, out_amplitude, critical_map)`` where the
    integral equals ``exp(i reduced_phase/h) * prefactor * out_amplitude``
    under the pinned kernel normalization.
    """
    ctx = phase.ctx
    if amplitude.ctx != ctx:
        raise SeriesError("phase and amplitude context mismatch")
    z_vars = list(z_vars)
    if not z_vars:
        return phase, 1.0 + 0.0j, amplitude, {}
    zidx = [ctx.index(v) for v in z_vars]
    for v in z_vars:
        if ctx.weights[ctx.index(v)] != 1:
            raise SeriesError("integration variables must have weight 1")
    if phase.depends_on(HBAR):
        raise SeriesError("phase must not depend on the deformation parameter")

    def z_degree(exp):
        return sum(exp[i] for i in zidx)

    for e, c in phase.terms.items():
        total = ctx.weighted_degree(e)
        if total - z_degree(e) == 0 and z_degree(e) <= 1 and abs(c) > ctx.eps:
            raise SeriesError("phase has constant or z-linear part at the base point")

    Q = hessian_matrix(phase, z_vars)
    pref = gaussian_prefactor(Q, ctx.eps)

    # critical point z*(params) by jet iteration
    grad = [phase.diff(v) for v in z_vars]
    n = len(z_vars)
    Qinv = np.linalg.inv(Q)
    zero_map = {v: ctx.zero() for v in z_vars}
    zstar = dict(zero_map)
    for _ in range(ctx.cap + 1):
        gvals = [compose(g, zstar) for g in grad]
        # Newton step with the constant Hessian: z <- z - Q^{-1} grad(z)
        new = {}
        for i, v in enumerate(z_vars):
            delta = ctx.zero()
            for j in range(n):
                delta = delta + gvals[j] * Qinv[i, j]
            new[v] = zstar[v] - delta
        zstar = new
    for i, v in enumerate(z_vars):
        check = compose(grad[i], zstar)
        if check.max_abs() > 1e3 * ctx.eps:
            raise SeriesError("critical point iteration did not converge")

    reduced = compose(phase, zstar)

    # recenter: R(u) = phase(z* + u) - reduced; interaction = R - (1/2) u.Qu
    shift = {v: zstar[v] + ctx.variable(v) for v in z_vars}
    R = compose(phase, shift) - reduced
    quad = ctx.zero()
    for i in range(n):
        for j in range(i, n):
            c = Q[i, i] / 2.0 if i == j else Q[i, j]
            if abs(c) > ctx.eps:
                mono = {z_vars[i]: 2} if i == j else {z_vars[i]: 1, z_vars[j]: 1}
                quad = quad + ctx.monomial(mono, c)
    delta = R - quad
    if not delta.is_zero() and delta.min_degree() < 3:
        raise SeriesError("interaction term does not raise the filtration")

    a_centered = compose(amplitude, shift)
    # exp(i delta / h): multiply by i, shift hbar exponent down by one
    if HBAR not in ctx.laurent and not delta.is_zero():
        raise SeriesError("context must allow inverse powers of h")
    integrand = a_centered
    if not delta.is_zero():
        interaction = (delta * 1j).shift_exponent(HBAR, -1)
        integrand = a_centered * interaction.exp()

    # Wick contraction of the z-block
    hidx = ctx.index(HBAR)
    out_terms: dict[tuple[int, ...], complex] = {}
    moment_cache: dict[tuple[int, ...], tuple[complex, int]] = {}
    for e, c in integrand.terms.items():
        alpha = tuple(e[i] for i in zidx)
        if sum(alpha) % 2 == 1:
            continue
        if alpha in moment_cache:
            mom, hpow = moment_cache[alpha]
        else:
            mom, hpow = gaussian_moment(Q, alpha)
            moment_cache[alpha] = (mom, hpow)
        if abs(mom) < ctx.eps and sum(alpha) > 0:
            continue
        e2 = list(e)
        for i in zidx:
            e2[i] = 0
        e2[hidx] += hpow
        e2 = tuple(e2)
        if not ctx.admits(e2):
            continue
        out_terms[e2] = out_terms.get(e2, 0.0) + c * (mom if sum(alpha) else 1.0)
    out = TruncatedSeries(ctx, out_terms)
    return reduced, pref, out, zstar


# --- spec-level wrappers -----------------------------------------------------


def _joint_context(F: TruncatedSeries, variables: Sequence[str]):
    """Context holding y-variables, matching dual slots and h (laurent)."""
    ctx = F.ctx
    duals = [f"_dual_{v}" for v in variables]
    names = list(ctx.variables) + duals
    weights = list(ctx.weights) + [1] * len(duals)
    if HBAR not in ctx.variables:
        names.append(HBAR)
        weights.append(2)
    joint = SeriesContext(names, weights, ctx.cap, ctx.eps,
                          laurent=set(ctx.laurent) | {HBAR},
                          base_cap=ctx.base_cap)
    return joint, duals


def legendre_transform(F: TruncatedSeries,
                       variables: Sequence[str] | None = None) -> TruncatedSeries:
    """Legendre transform ``G(eta) = eta.y + F(y)`` at ``eta + F'(y) = 0``.

    The result is expressed in the input variable names again, so the
    double transform can be compared with the parity-reflected input.
    """
    ctx = F.ctx
    if variables is None:
        variables = [v for v, w in zip(ctx.variables, ctx.weights)
                     if w == 1 and F.depends_on(v)]
        if not variables:
            variables = [v for v, w in zip(ctx.variables, ctx.weights) if w == 1]
    for e, c in F.terms.items():
        if ctx.weighted_degree(e) <= 1 and abs(c) > ctx.eps:
            raise SeriesError("Legendre input must lack constant and linear terms")
    joint, duals = _joint_context(F, variables)
    Fj = F.map_vars({}, joint)
    phase = Fj
    for v, d in zip(variables, duals):
        phase = phase + joint.monomial({v: 1, d: 1}, 1.0)
    G, _, _, _ = fiber_stationary_phase(phase, joint.one(), variables)
    return G.map_vars({d: v for v, d in zip(variables, duals)}, ctx)


def stationary_phase(F: TruncatedSeries, a: TruncatedSeries,
                     variables: Sequence[str] | None = None):
    """Full-line Fourier integral of ``exp(iF/h) a`` by formal expansion.

    Returns ``(G, prefactor, b)`` with ``G`` the Legendre transform of the
    phase, the Gaussian branch prefactor, and the amplitude expansion
    ``b``; both ``G`` and ``b`` come back in the input variable names.
    A zero amplitude short-circuits to zero output.
    """
    ctx = F.ctx
    if variables is None:
        variables = [v for v, w in zip(ctx.variables, ctx.weights)
                     if w == 1 and (F.depends_on(v) or a.depends_on(v))]
        if not variables:
            variables = [v for v, w in zip(ctx.variables, ctx.weights) if w == 1]
    Q = hessian_matrix(F, variables)
    pref = gaussian_prefactor(Q, ctx.eps)
    if a.is_zero():
        return legendre_transform(F, variables), pref, a
    joint, duals = _joint_context(F, variables)
    Fj = F.map_vars({}, joint)
    aj = a.map_vars({}, joint)
    phase = Fj
    for v, d in zip(variables, duals):
        phase = phase + joint.monomial({v: 1, d: 1}, 1.0)
    G, pref2, b, _ = fiber_stationary_phase(phase, aj, variables)
    back = {d: v for v, d in zip(variables, duals)}
    return G.map_vars(back, ctx), pref2, b.map_vars(back, ctx)


# --- numerical oracle --------------------------------------------------------


def numeric_gaussian_constant(k: float, hbar: float) -> complex:
    """Adaptive quadrature of ``(2 pi h)^{-1/2} Int exp(i k x^2 / 2h) dx``.

    Independent check for the branch of the formal Gaussian rule.
    """
    from scipy.integrate import quad

    c = abs(k) / (2.0 * hbar)
    # substitute u = x^2:  Int_R = Int_0^inf u^{-1/2} (cos(cu) + i sin(cu)) du
    def density(u):
        return 1.0 / math.sqrt(u)

    re_head, _ = quad(lambda u: density(u) * math.cos(c * u), 0.0, 1.0, limit=400)
    im_head, _ = quad(lambda u: density(u) * math.sin(c * u), 0.0, 1.0, limit=400)
    re_tail, _ = quad(density, 1.0, np.inf, weight="cos", wvar=c, limit=400)
    im_tail, _ = quad(density, 1.0, np.inf, weight="sin", wvar=c, limit=400)
    total = (re_head + re_tail) + 1j * (im_head + im_tail)
    if k < 0:
        total = total.conjugate()
    return total / math.sqrt(2.0 * math.pi * hbar)
