"""Moyal product, Weyl quantization, graded Lie data and the formal
automorphism groups acting on the algebra.

Variables: ``u1..un`` are the formal position jets, ``v1..vn`` the dual
momentum jets, ``h`` the deformation parameter (weight 2, Laurent
allowed).  The sign convention of the product gives ``[u, v] = -ih``;
this is stated here once because it fixes every downstream phase.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .series import SeriesContext, SeriesError, TruncatedSeries, compose, invert_map

HBAR = "h"


class NonTerminatingAdError(SeriesError):
    pass


class WeylAlgebra:
    """Ambient data for Weyl elements on R^{2n} jets.

    Optional weight-0 ``base_vars`` ride along for chart-parametrized
    computations; they are capped separately by ``base_cap``.
    """

    def __init__(self, n: int, cap: int, eps: float = 1e-9,
                 base_vars: Sequence[str] = (), base_cap: int | None = None):
        self.n = n
        self.x = tuple(f"u{i+1}" for i in range(n))
        self.xi = tuple(f"v{i+1}" for i in range(n))
        names = list(self.x + self.xi) + [HBAR] + list(base_vars)
        weights = [1] * (2 * n) + [2] + [0] * len(base_vars)
        if base_vars and base_cap is None:
            base_cap = cap
        self.ctx = SeriesContext(names, weights, cap, eps,
                                 laurent={HBAR}, base_cap=base_cap)
        self.base_vars = tuple(base_vars)
        self._ext: dict[int, "WeylAlgebra"] = {}

    @property
    def cap(self):
        return self.ctx.cap

    def extended(self, extra: int = 2) -> "WeylAlgebra":
        """Same algebra with cap headroom, for intermediates that divide
        by the deformation parameter before re-truncation."""
        if extra not in self._ext:
            self._ext[extra] = WeylAlgebra(
                self.n, self.cap + extra, self.ctx.eps,
                self.base_vars, self.ctx.base_cap)
        return self._ext[extra]

    def lift(self, s: TruncatedSeries, extra: int = 2) -> TruncatedSeries:
        return s.map_vars({}, self.extended(extra).ctx)

    def lower(self, s: TruncatedSeries) -> TruncatedSeries:
        return s.map_vars({}, self.ctx)

    def zero(self):
        return self.ctx.zero()

    def one(self):
        return self.ctx.one()

    def var(self, name, power=1):
        return self.ctx.variable(name, power)

    def hbar(self, power=1):
        return self.ctx.variable(HBAR, power)


def _multi_indices(n: int, max_total: int):
    for total in range(max_total + 1):
        for cut in itertools.combinations(range(total + n - 1), n - 1) if n > 1 else [()]:
            if n == 1:
                yield (total,)
                break
            prev = -1
            parts = []
            for c in cut:
                parts.append(c - prev - 1)
                prev = c
            parts.append(total + n - 2 - prev)
            yield tuple(parts)


def _factorial_multi(alpha):
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def _derive(f: TruncatedSeries, variables: Sequence[str], alpha) -> TruncatedSeries:
    out = f
    for v, k in zip(variables, alpha):
        for _ in range(k):
            out = out.diff(v)
            if out.is_zero():
                return out
    return out


def moyal_star(A: WeylAlgebra, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Moyal product of Weyl symbols, truncated at the cap.

    exp((ih/2)(d_xi . d_y - d_eta . d_x)) f(x, xi) g(y, eta) on the
    diagonal, expanded into the finite bidifferential sum.
    """
    if f.ctx != A.ctx or g.ctx != A.ctx:
        raise SeriesError("cap/context mismatch in star product")
    cap = A.cap
    kmax = cap // 2
    out = A.zero()
    # caches keyed by (alpha, beta): d_xi^a d_x^b f  /  d_x^a d_xi^b g
    for alpha in _multi_indices(A.n, kmax):
        fa = _derive(f, A.xi, alpha)
        if fa.is_zero() and sum(alpha) > 0:
            continue
        ga = _derive(g, A.x, alpha)
        if ga.is_zero() and sum(alpha) > 0:
            continue
        rem = kmax - sum(alpha)
        for beta in _multi_indices(A.n, rem):
            k = sum(alpha) + sum(beta)
            fab = _derive(fa, A.x, beta)
            if fab.is_zero():
                continue
            gab = _derive(ga, A.xi, beta)
            if gab.is_zero():
                continue
            coeff = ((1j / 2) ** k) * ((-1) ** sum(beta)) \
                / (_factorial_multi(alpha) * _factorial_multi(beta))
            term = (fab * gab * coeff).shift_exponent(HBAR, k)
            out = out + term
    return out


def commutator(A: WeylAlgebra, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return moyal_star(A, f, g) - moyal_star(A, g, f)


def poisson_leading(A: WeylAlgebra, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """(1/ih)[f,g] mod h; leading term of the deformation."""
    Ax = A.extended(2)
    c = commutator(Ax, A.lift(f), A.lift(g))
    s = (c * -1j).shift_exponent(HBAR, -1)
    i_h = Ax.ctx.index(HBAR)
    return A.lower(s.filter_terms(lambda e: e[i_h] == 0))


def poisson_bracket(A: WeylAlgebra, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """{f,g} = d_xi f . d_x g - d_x f . d_xi g, the classical bracket with
    {x, xi} = -1 under the product sign convention."""
    out = A.zero()
    for xv, kv in zip(A.x, A.xi):
        out = out + f.diff(kv) * g.diff(xv) - f.diff(xv) * g.diff(kv)
    return out


# --- Weyl quantization: normal-ordered operator forms -------------------------


class NormalOperator:
    """Operator on C[[u, h]] written as sum C u^alpha (ih d_u)^beta h^c,
    stored through its normal symbol (u to the left)."""

    __slots__ = ("algebra", "symbol")

    def __init__(self, algebra: WeylAlgebra, symbol: TruncatedSeries):
        self.algebra = algebra
        self.symbol = symbol

    @staticmethod
    def _mixing(A: WeylAlgebra, s: TruncatedSeries, direction: complex) -> TruncatedSeries:
        # exp(direction * (ih/2) sum_j d_u d_v) applied to the symbol
        out = s
        term = s
        for k in range(1, A.cap + 1):
            nxt = A.zero()
            for xv, kv in zip(A.x, A.xi):
                nxt = nxt + term.diff(xv).diff(kv)
            if nxt.is_zero():
                break
            term = (nxt * (direction * 0.5j / k)).shift_exponent(HBAR, 1)
            if term.is_zero():
                break
            out = out + term
        return out

    @classmethod
    def from_weyl(cls, A: WeylAlgebra, w: TruncatedSeries) -> "NormalOperator":
        return cls(A, cls._mixing(A, w, +1.0))

    def to_weyl(self) -> TruncatedSeries:
        return self._mixing(self.algebra, self.symbol, -1.0)

    def compose(self, other: "NormalOperator") -> "NormalOperator":
        A = self.algebra
        out = A.zero()
        for beta in _multi_indices(A.n, A.cap):
            left = _derive(self.symbol, A.xi, beta)
            if left.is_zero():
                continue
            right = _derive(other.symbol, A.x, beta)
            if right.is_zero():
                continue
            coeff = (1j ** sum(beta)) / _factorial_multi(beta)
            out = out + (left * right * coeff).shift_exponent(HBAR, sum(beta))
        return NormalOperator(A, out)

    def apply(self, f: TruncatedSeries) -> TruncatedSeries:
        """Apply to a series in the position jets (and h)."""
        A = self.algebra
        for kv in A.xi:
            if f.depends_on(kv):
                raise SeriesError("operator argument depends on momentum jets")
        out = f.ctx.zero()
        deriv_cache: dict[tuple, TruncatedSeries] = {}
        xi_idx = [A.ctx.index(kv) for kv in A.xi]
        for e, c in self.symbol.terms.items():
            beta = tuple(e[i] for i in xi_idx)
            if beta in deriv_cache:
                df = deriv_cache[beta]
            else:
                df = _derive(f, A.x, beta)
                deriv_cache[beta] = df
            if df.is_zero():
                continue
            rest = list(e)
            for i in xi_idx:
                rest[i] = 0
            mono = TruncatedSeries(A.ctx, {tuple(rest): c})
            term = (mono * df * (1j ** sum(beta))).shift_exponent(HBAR, sum(beta))
            out = out + term
        return out


def weyl_quantize(A: WeylAlgebra, w: TruncatedSeries) -> NormalOperator:
    """Symmetrized-product quantization u^a v^b -> sym(u^a, (ih d_u)^b)."""
    return NormalOperator.from_weyl(A, w)


def weyl_symbol(op: NormalOperator) -> TruncatedSeries:
    return op.to_weyl()


def operator_from_action(A: WeylAlgebra, action: Callable[[TruncatedSeries], TruncatedSeries],
                         max_order: int) -> NormalOperator:
    """Reconstruct a normal symbol from the action on position monomials.

    Valid for operators of differential order at most ``max_order`` whose
    coefficients stay within the cap; the recovery is triangular in the
    derivative order.
    """
    ctx = A.ctx
    N = NormalOperator(A, ctx.zero())
    for order in range(max_order + 1):
        for gamma in _multi_indices(A.n, order):
            if sum(gamma) != order:
                continue
            mono = ctx.monomial({v: g for v, g in zip(A.x, gamma)}, 1.0)
            residual = action(mono) - N.apply(mono)
            if residual.is_zero():
                continue
            scale = (1.0 / ((1j ** order) * _factorial_multi(gamma)))
            block = (residual * scale).shift_exponent(HBAR, -order)
            vmono = ctx.monomial({v: g for v, g in zip(A.xi, gamma)}, 1.0)
            N = NormalOperator(A, N.symbol + block * vmono)
    return N


# --- Lie elements and the exponentiated adjoint -------------------------------


@dataclass(frozen=True)
class LieElement:
    """(1/ih) payload with the bracket a*b - b*a.

    Tag "g" quotients out the central (1/ih)C[[h]] line: pure-h terms of
    the payload are dropped at construction.
    """

    algebra: WeylAlgebra
    payload: TruncatedSeries
    tag: str = "gtilde"

    def __post_init__(self):
        if self.tag not in ("g", "gtilde"):
            raise SeriesError("tag must be g or gtilde")
        if self.tag == "g":
            A = self.algebra
            idx = [A.ctx.index(v) for v in A.x + A.xi]
            cleaned = self.payload.filter_terms(lambda e: any(e[i] for i in idx))
            object.__setattr__(self, "payload", cleaned)

    def ad(self, w: TruncatedSeries) -> TruncatedSeries:
        # star-commutators are degree-homogeneous, so the division by h
        # reaches down from above the cap: compute with headroom.
        A = self.algebra
        Ax = A.extended(2)
        c = commutator(Ax, A.lift(self.payload), A.lift(w))
        return A.lower((c * -1j).shift_exponent(HBAR, -1))

    def bracket(self, other: "LieElement") -> "LieElement":
        """g-tilde bracket: (1/ih)f, (1/ih)g -> (1/ih)((1/ih)[f,g])."""
        return LieElement(self.algebra, self.ad(other.payload), "gtilde")

    def graded_profile(self) -> list[int]:
        degs = sorted({self.algebra.ctx.weighted_degree(e) - 2
                       for e in self.payload.terms})
        return degs


def _ad_terminates(A: WeylAlgebra, payload: TruncatedSeries) -> bool:
    """Structural termination test for the adjoint series.

    Allowed: filtration-raising terms (degree >= 3), central terms, and
    low-degree terms supported on one side only (pure position or pure
    momentum), whose adjoint strictly lowers the opposite degree.  Mixed
    low-degree terms generate rotations with non-terminating series.
    """
    ctx = A.ctx
    x_idx = [ctx.index(v) for v in A.x]
    xi_idx = [ctx.index(v) for v in A.xi]
    side = 0  # +1 position-only lows, -1 momentum-only lows
    for e in payload.terms:
        d = ctx.weighted_degree(e)
        xdeg = sum(e[i] for i in x_idx)
        vdeg = sum(e[i] for i in xi_idx)
        if d >= 3 or (xdeg == 0 and vdeg == 0):
            continue
        if vdeg == 0:
            this = 1
        elif xdeg == 0:
            this = -1
        else:
            return False
        if side == 0:
            side = this
        elif side != this:
            return False
    return True


def exp_ad(h: LieElement, w: TruncatedSeries, max_iter: int | None = None) -> TruncatedSeries:
    """sum_k ad(h)^k w / k!; raises when the payload shape cannot make
    the series terminate under truncation."""
    A = h.algebra
    if not _ad_terminates(A, h.payload):
        raise NonTerminatingAdError(
            "adjoint series does not terminate: payload neither raises the "
            "filtration nor is of one-sided low-degree type")
    if max_iter is None:
        max_iter = (A.cap + 2) * (A.cap + 2)
    result = w
    term = w
    for k in range(1, max_iter + 1):
        term = h.ad(term) * (1.0 / k)
        if term.is_zero():
            return result
        result = result + term
    raise NonTerminatingAdError("adjoint series did not terminate")


def lie_classify(h: LieElement) -> dict:
    """Monomial-pattern membership in Lie(P), Lie(N) and k>=1, plus the
    graded profile of the payload."""
    A = h.algebra
    ctx = A.ctx
    xi_idx = [ctx.index(v) for v in A.xi]
    x_idx = [ctx.index(v) for v in A.x]
    h_idx = ctx.index(HBAR)
    in_p = in_n = in_k1 = True
    for e, c in h.payload.terms.items():
        beta = sum(e[i] for i in xi_idx)
        xdeg = sum(e[i] for i in x_idx)
        hp = e[h_idx]
        d = ctx.weighted_degree(e)
        ok_p = (beta >= 1 and d >= 2) or (hp >= 1 and d >= 3)
        ok_n = (beta >= 2) or (hp >= 1 and beta >= 1) or (hp >= 2)
        ok_k1 = (beta == 1 and hp == 0 and xdeg >= 2) or \
                (beta == 0 and hp == 1 and xdeg >= 1)
        in_p &= ok_p
        in_n &= ok_n
        in_k1 &= ok_k1
    return {
        "in_lie_p": in_p,
        "in_lie_n": in_n,
        "in_k_geq1": in_k1,
        "graded_profile": h.graded_profile(),
    }


# --- the K group ---------------------------------------------------------------


class KGroupElement:
    """Formal automorphism of the trivial half-density line bundle:

        f(u) -> exp(q(u)) f(g(u)) |det g'(u)|^{1/2}

    with g a formal diffeomorphism (invertible linear part) and q(0)=0.
    """

    def __init__(self, algebra: WeylAlgebra, images: Mapping[str, TruncatedSeries],
                 q: TruncatedSeries | None = None):
        A = algebra
        self.algebra = A
        ctx = A.ctx
        self.images = {v: images[v] for v in A.x}
        self.q = ctx.zero() if q is None else q
        bad_vars = list(A.xi) + [HBAR]
        for v, s in self.images.items():
            if abs(s.constant_term()) > ctx.eps:
                raise SeriesError("diffeomorphism image has a constant term")
            if any(s.depends_on(b) for b in bad_vars):
                raise SeriesError("diffeomorphism must involve position jets only")
        if abs(self.q.constant_term()) > ctx.eps:
            raise SeriesError("multiplier exponent must vanish at the origin")
        if any(self.q.depends_on(b) for b in bad_vars):
            raise SeriesError("multiplier must involve position jets only")
        a = np.array([[self.images[xv].coefficient({uv: 1}) for uv in A.x]
                      for xv in A.x], dtype=complex)
        if abs(np.linalg.det(a)) <= ctx.eps:
            raise SeriesError("non-invertible linear part")
        self.linear = a

    @staticmethod
    def identity(algebra: WeylAlgebra) -> "KGroupElement":
        return KGroupElement(algebra, {v: algebra.var(v) for v in algebra.x})

    def jacobian_det(self) -> TruncatedSeries:
        A = self.algebra
        n = A.n
        cols = [[self.images[A.x[i]].diff(A.x[j]) for j in range(n)] for i in range(n)]
        out = A.zero()
        for perm in itertools.permutations(range(n)):
            sign = 1
            seen = list(perm)
            # parity by counting inversions
            inv = sum(1 for i in range(n) for j in range(i + 1, n) if seen[i] > seen[j])
            sign = -1 if inv % 2 else 1
            term = A.one()
            for i in range(n):
                term = term * cols[i][perm[i]]
            out = out + term * sign
        return out

    def half_density_factor(self) -> TruncatedSeries:
        det = self.jacobian_det()
        c0 = det.constant_term()
        unit = det * (1.0 / c0)
        return unit.unit_sqrt() * math.sqrt(abs(c0))

    def act(self, f: TruncatedSeries) -> TruncatedSeries:
        """The displayed action on series in the position jets."""
        A = self.algebra
        for kv in A.xi:
            if f.depends_on(kv):
                raise SeriesError("K acts on position-jet series")
        moved = compose(f, self.images)
        out = moved * self.half_density_factor()
        if not self.q.is_zero():
            out = out * self.q.exp()
        return out

    def inverse(self) -> "KGroupElement":
        inv_images = invert_map(self.images)
        qinv = -compose(self.q, inv_images)
        return KGroupElement(self.algebra, inv_images, qinv)

    def compose_with(self, other: "KGroupElement") -> "KGroupElement":
        """Element acting as self after other: (self*other).act = self.act o other.act."""
        A = self.algebra
        # (self(other f))(u) = e^{q_s(u)} e^{q_o(g_s u)} f(g_o(g_s u)) |...|
        images = {v: compose(other.images[v], self.images) for v in A.x}
        q = self.q + compose(other.q, self.images)
        return KGroupElement(A, images, q)


def k_act(k: KGroupElement, f: TruncatedSeries) -> TruncatedSeries:
    return k.act(f)


def k_conjugate(k: KGroupElement, w: TruncatedSeries) -> TruncatedSeries:
    """Weyl symbol of k o W(w) o k^{-1}.

    Conjugation preserves the differential order, so the symbol is
    reconstructed from the action on position monomials; the whole
    computation runs with cap headroom because the reconstruction reaches
    down by the derivative order.
    """
    A = k.algebra
    order = max((sum(e[A.ctx.index(v)] for v in A.xi)
                 for e in w.terms), default=0)
    Ax = A.extended(2 * order + 2)
    kx = KGroupElement(Ax, {v: A.lift(s, 2 * order + 2) for v, s in k.images.items()},
                       A.lift(k.q, 2 * order + 2))
    op = weyl_quantize(Ax, A.lift(w, 2 * order + 2))
    kinv = kx.inverse()

    def action(f):
        return kx.act(op.apply(kinv.act(f)))

    conj = operator_from_action(Ax, action, order)
    return A.lower(conj.to_weyl())


# --- operator realization of exp of Lie elements -------------------------------


def lie_operator(h: LieElement) -> NormalOperator:
    """Normal operator of (1/ih) payload."""
    A = h.algebra
    N = NormalOperator.from_weyl(A, h.payload)
    sym = (N.symbol * -1j).shift_exponent(HBAR, -1)
    return NormalOperator(A, sym)


def exp_lie_apply(h: LieElement, f: TruncatedSeries,
                  max_iter: int | None = None) -> TruncatedSeries:
    """Apply exp((1/ih) payload-hat) to a position-jet series.

    Requires the operator to raise the filtration so the exponential
    terminates under truncation; inverse powers of h may appear when the
    payload sits outside Lie(P).
    """
    A = h.algebra
    if max_iter is None:
        max_iter = 4 * A.cap + 8
    op = lie_operator(h)
    out = f
    term = f
    for k in range(1, max_iter + 1):
        term = op.apply(term) * (1.0 / k)
        if term.is_zero():
            return out
        out = out + term
    raise NonTerminatingAdError("operator exponential did not terminate")
