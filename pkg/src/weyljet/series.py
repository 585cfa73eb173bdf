"""Sparse truncated multivariate formal power series.

Every series lives in a :class:`SeriesContext` that fixes the variable
names, their filtration weights, the truncation cap and the coefficient
zero-threshold.  Jet coordinates weigh 1 and the deformation parameter
``h`` weighs 2; a term is kept only while its weighted degree stays at or
below the cap.  Variables listed in ``laurent`` may carry negative
exponents (bounded below through the filtration), which realizes the
completed coefficient rings with inverse powers of ``h``.

Purely bookkeeping variables of weight 0 (symbolic base-point
coordinates) are truncated separately by ``base_cap`` on their total
degree.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

DEFAULT_EPS = 1e-9


class SeriesError(ValueError):
    pass


class SeriesContext:
    """Shared ambient data for a family of series.

    Contexts are immutable; two contexts compare equal when all their
    fields agree, and series operations require equal contexts.
    """

    __slots__ = ("variables", "weights", "cap", "eps", "laurent",
                 "base_cap", "_index", "_key")

    def __init__(self, variables: Sequence[str], weights: Sequence[int],
                 cap: int, eps: float = DEFAULT_EPS,
                 laurent: Iterable[str] = (), base_cap: int | None = None):
        variables = tuple(variables)
        weights = tuple(int(w) for w in weights)
        if len(variables) != len(weights):
            raise SeriesError("variables and weights length mismatch")
        if len(set(variables)) != len(variables):
            raise SeriesError("duplicate variable names")
        if any(w < 0 for w in weights):
            raise SeriesError("weights must be nonnegative")
        if cap < 0:
            raise SeriesError("cap must be nonnegative")
        if any(w == 0 for w in weights) and base_cap is None:
            raise SeriesError("weight-0 variables require base_cap")
        self.variables = variables
        self.weights = weights
        self.cap = int(cap)
        self.eps = float(eps)
        self.laurent = frozenset(laurent)
        unknown = self.laurent - set(variables)
        if unknown:
            raise SeriesError(f"laurent names not in variables: {sorted(unknown)}")
        self.base_cap = base_cap
        self._index = {v: i for i, v in enumerate(variables)}
        self._key = (variables, weights, self.cap, self.eps,
                     self.laurent, base_cap)

    def __eq__(self, other):
        return isinstance(other, SeriesContext) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return (f"SeriesContext(vars={self.variables}, cap={self.cap})")

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise SeriesError(f"unknown variable {var!r}") from None

    def weighted_degree(self, exp: tuple[int, ...]) -> int:
        return sum(e * w for e, w in zip(exp, self.weights))

    def base_degree(self, exp: tuple[int, ...]) -> int:
        return sum(e for e, w in zip(exp, self.weights) if w == 0)

    def admits(self, exp: tuple[int, ...]) -> bool:
        if self.weighted_degree(exp) > self.cap:
            return False
        if self.base_cap is not None and self.base_degree(exp) > self.base_cap:
            return False
        return True

    # --- constructors -------------------------------------------------

    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {})

    def one(self) -> "TruncatedSeries":
        return self.constant(1.0)

    def constant(self, c) -> "TruncatedSeries":
        return TruncatedSeries(self, {(0,) * len(self.variables): complex(c)})

    def variable(self, name: str, power: int = 1) -> "TruncatedSeries":
        i = self.index(name)
        exp = tuple(power if j == i else 0 for j in range(len(self.variables)))
        return TruncatedSeries(self, {exp: 1.0 + 0.0j})

    def monomial(self, exp: Mapping[str, int] | Sequence[int], coeff=1.0) -> "TruncatedSeries":
        if isinstance(exp, Mapping):
            e = [0] * len(self.variables)
            for v, p in exp.items():
                e[self.index(v)] = int(p)
            exp = tuple(e)
        else:
            exp = tuple(int(p) for p in exp)
        return TruncatedSeries(self, {exp: complex(coeff)})

    def from_terms(self, terms: Mapping[tuple[int, ...], complex]) -> "TruncatedSeries":
        return TruncatedSeries(self, dict(terms))

    def with_cap(self, cap: int) -> "SeriesContext":
        return SeriesContext(self.variables, self.weights, cap, self.eps,
                             self.laurent, self.base_cap)

    def extended(self, variables: Sequence[str], weights: Sequence[int],
                 laurent: Iterable[str] = (), base_cap: int | None = None) -> "SeriesContext":
        return SeriesContext(self.variables + tuple(variables),
                             self.weights + tuple(weights),
                             self.cap, self.eps,
                             self.laurent | frozenset(laurent),
                             base_cap if base_cap is not None else self.base_cap)


class TruncatedSeries:
    """A finite sparse term map ``exponent tuple -> complex coefficient``.

    Instances are immutable; arithmetic returns new objects and results
    never depend on term insertion order.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: SeriesContext, terms: Mapping[tuple[int, ...], complex]):
        self.ctx = ctx
        eps = ctx.eps
        clean: dict[tuple[int, ...], complex] = {}
        nvars = len(ctx.variables)
        for exp, c in terms.items():
            c = complex(c)
            if abs(c) < eps:
                continue
            if len(exp) != nvars:
                raise SeriesError("exponent arity mismatch")
            if not ctx.admits(exp):
                continue
            for e, v, w in zip(exp, ctx.variables, ctx.weights):
                if e < 0 and v not in ctx.laurent:
                    raise SeriesError(f"negative exponent on non-laurent variable {v!r}")
            clean[exp] = c
        self.terms = clean

    # --- inspection ----------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exp: Mapping[str, int] | Sequence[int]) -> complex:
        if isinstance(exp, Mapping):
            e = [0] * len(self.ctx.variables)
            for v, p in exp.items():
                e[self.ctx.index(v)] = int(p)
            exp = tuple(e)
        else:
            exp = tuple(exp)
        return self.terms.get(exp, 0.0 + 0.0j)

    def constant_term(self) -> complex:
        return self.terms.get((0,) * len(self.ctx.variables), 0.0 + 0.0j)

    def min_degree(self) -> int:
        """Smallest weighted degree present (0 for the zero series)."""
        if not self.terms:
            return 0
        return min(self.ctx.weighted_degree(e) for e in self.terms)

    def max_degree(self) -> int:
        if not self.terms:
            return 0
        return max(self.ctx.weighted_degree(e) for e in self.terms)

    def max_exponent(self, var: str) -> int:
        i = self.ctx.index(var)
        if not self.terms:
            return 0
        return max(e[i] for e in self.terms)

    def min_exponent(self, var: str) -> int:
        i = self.ctx.index(var)
        if not self.terms:
            return 0
        return min(e[i] for e in self.terms)

    def depends_on(self, var: str) -> bool:
        i = self.ctx.index(var)
        return any(e[i] != 0 for e in self.terms)

    def graded_component(self, degree: int) -> "TruncatedSeries":
        wd = self.ctx.weighted_degree
        return TruncatedSeries(self.ctx, {e: c for e, c in self.terms.items()
                                          if wd(e) == degree})

    def filter_terms(self, pred) -> "TruncatedSeries":
        """Keep the terms whose exponent tuple satisfies ``pred``."""
        return TruncatedSeries(self.ctx, {e: c for e, c in self.terms.items() if pred(e)})

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_close(self, other: "TruncatedSeries", tol: float | None = None) -> bool:
        return (self - other).max_abs() <= (self.ctx.eps if tol is None else tol)

    def distance(self, other: "TruncatedSeries") -> float:
        return (self - other).max_abs()

    # --- ring operations ------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if self.ctx != other.ctx:
            raise SeriesError("series context mismatch")

    def __add__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = self.ctx.constant(complex(other))
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return TruncatedSeries(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = self.ctx.constant(complex(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            c = complex(other)
            return TruncatedSeries(self.ctx, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        ctx = self.ctx
        cap = ctx.cap
        wd = ctx.weighted_degree
        a = sorted(self.terms.items(), key=lambda t: wd(t[0]))
        b = sorted(other.terms.items(), key=lambda t: wd(t[0]))
        if not a or not b:
            return ctx.zero()
        bmin = wd(b[0][0])
        out: dict[tuple[int, ...], complex] = {}
        for ea, ca in a:
            da = wd(ea)
            if da + bmin > cap:
                break
            for eb, cb in b:
                if da + wd(eb) > cap:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                if ctx.base_cap is not None and ctx.base_degree(e) > ctx.base_cap:
                    continue
                out[e] = out.get(e, 0.0) + ca * cb
        return TruncatedSeries(ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise SeriesError("negative powers: use unit_inverse")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- calculus -------------------------------------------------------

    def diff(self, var: str) -> "TruncatedSeries":
        i = self.ctx.index(var)
        out: dict[tuple[int, ...], complex] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = out.get(tuple(e2), 0.0) + c * e[i]
        return TruncatedSeries(self.ctx, out)

    def shift_exponent(self, var: str, k: int) -> "TruncatedSeries":
        """Multiply by var**k at the exponent level (k may be negative
        for laurent variables)."""
        i = self.ctx.index(var)
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[i] += k
            out[tuple(e2)] = c
        return TruncatedSeries(self.ctx, out)

    # --- composition-grade helpers ---------------------------------------

    def exp(self) -> "TruncatedSeries":
        """exp of a series with strictly positive minimal weighted degree."""
        if self.is_zero():
            return self.ctx.one()
        if self.min_degree() < 1:
            raise SeriesError("exp requires filtration-raising argument")
        result = self.ctx.one()
        term = self.ctx.one()
        for k in range(1, self.ctx.cap + 1):
            term = term * self * (1.0 / k)
            if term.is_zero():
                break
            result = result + term
        return result

    def unit_inverse(self) -> "TruncatedSeries":
        c0 = self.constant_term()
        if abs(c0) < self.ctx.eps:
            raise SeriesError("inverse of a non-unit series")
        u = self * (1.0 / c0) - 1.0
        result = self.ctx.one()
        term = self.ctx.one()
        for _ in range(self.ctx.cap + 1):
            term = term * u * (-1.0)
            if term.is_zero():
                break
            result = result + term
        return result * (1.0 / c0)

    def unit_sqrt(self) -> "TruncatedSeries":
        """Square root of a series with positive real leading constant."""
        c0 = self.constant_term()
        if abs(c0) < self.ctx.eps:
            raise SeriesError("sqrt of a non-unit series")
        if abs(c0.imag) > self.ctx.eps or c0.real <= 0:
            raise SeriesError("unit_sqrt expects a positive real lead")
        u = self * (1.0 / c0) - 1.0
        result = self.ctx.one()
        term = self.ctx.one()
        coeff = 1.0
        half = Fraction(1, 2)
        for k in range(1, self.ctx.cap + 1):
            coeff *= float(half - (k - 1)) / k
            term = term * u
            if term.is_zero():
                break
            result = result + term * coeff
        return result * math.sqrt(c0.real)

    def evaluate(self, point: Mapping[str, complex]) -> complex:
        total = 0.0 + 0.0j
        vals = [complex(point.get(v, 0.0)) for v in self.ctx.variables]
        for e, c in self.terms.items():
            t = c
            for x, p in zip(vals, e):
                if p:
                    t *= x ** p
            total += t
        return total

    def map_vars(self, mapping: Mapping[str, str], new_ctx: SeriesContext) -> "TruncatedSeries":
        """Rename variables into another context (shared names keep their
        name); weights must agree variable-by-variable.  Source variables
        absent from the target are allowed while unused."""
        src = self.ctx
        used = [any(e[i] for e in self.terms) for i in range(len(src.variables))]
        targets: list[int | None] = []
        for i, (v, w) in enumerate(zip(src.variables, src.weights)):
            tv = mapping.get(v, v)
            if tv not in new_ctx._index:
                if used[i]:
                    raise SeriesError(f"unknown variable {tv!r}")
                targets.append(None)
                continue
            j = new_ctx.index(tv)
            if new_ctx.weights[j] != w:
                raise SeriesError(f"weight mismatch mapping {v!r} to {tv!r}")
            targets.append(j)
        n = len(new_ctx.variables)
        out: dict[tuple[int, ...], complex] = {}
        for e, c in self.terms.items():
            e2 = [0] * n
            for p, j in zip(e, targets):
                if j is not None:
                    e2[j] += p
            key = tuple(e2)
            out[key] = out.get(key, 0.0) + c
        return TruncatedSeries(new_ctx, out)

    # --- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        items = sorted(self.terms.items(), key=lambda t: t[0])
        return {
            "variables": list(self.ctx.variables),
            "weights": list(self.ctx.weights),
            "cap": self.ctx.cap,
            "terms": [{"exp": list(e), "re": c.real, "im": c.imag}
                      for e, c in items],
        }

    @staticmethod
    def from_json(data: dict, eps: float = DEFAULT_EPS,
                  laurent: Iterable[str] = (), base_cap: int | None = None) -> "TruncatedSeries":
        ctx = SeriesContext(data["variables"], data["weights"], data["cap"],
                            eps=eps, laurent=laurent, base_cap=base_cap)
        terms = {tuple(t["exp"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return TruncatedSeries(ctx, terms)

    def __repr__(self):
        if not self.terms:
            return "<series 0>"
        bits = []
        for e, c in sorted(self.terms.items())[:8]:
            mono = "*".join(f"{v}^{p}" for v, p in zip(self.ctx.variables, e) if p)
            bits.append(f"({c:.4g}){('*' + mono) if mono else ''}")
        more = "" if len(self.terms) <= 8 else f" +{len(self.terms) - 8} terms"
        return "<series " + " + ".join(bits) + more + ">"


# --- composition and map inversion ------------------------------------------


def compose(f: TruncatedSeries, images: Mapping[str, TruncatedSeries]) -> TruncatedSeries:
    """Substitute ``images[v]`` for each variable ``v`` of ``f``.

    Unlisted variables substitute as themselves.  Every image must have a
    vanishing constant term so that the substitution closes over the cap.
    """
    ctx = None
    for s in images.values():
        if ctx is None:
            ctx = s.ctx
        elif s.ctx != ctx:
            raise SeriesError("images live in different contexts")
    if ctx is None:
        ctx = f.ctx
    full: dict[str, TruncatedSeries] = {}
    for v in f.ctx.variables:
        if v in images:
            g = images[v]
            if abs(g.constant_term()) > g.ctx.eps:
                raise SeriesError(f"image of {v!r} has nonzero constant term")
            full[v] = g
        else:
            full[v] = ctx.variable(v)
    # positive powers computed lazily per variable
    pow_cache: dict[str, list[TruncatedSeries]] = {v: [ctx.one(), g] for v, g in full.items()}

    def power(v: str, k: int) -> TruncatedSeries:
        cache = pow_cache[v]
        while len(cache) <= k:
            cache.append(cache[-1] * cache[1])
        return cache[k]

    out = ctx.zero()
    for e, c in f.terms.items():
        term = ctx.constant(c)
        for v, p in zip(f.ctx.variables, e):
            if p == 0:
                continue
            if p < 0:
                img = full[v]
                if img.terms == ctx.variable(v).terms:
                    term = term.shift_exponent(v, p)
                    continue
                raise SeriesError("cannot compose through negative powers")
            term = term * power(v, p)
            if term.is_zero():
                break
        out = out + term
    return out


def invert_map(images: Mapping[str, TruncatedSeries]) -> dict[str, TruncatedSeries]:
    """Invert a formal map ``v -> images[v]`` on its block of variables.

    The images must have zero constant terms and jointly invertible
    linear part; the inverse is found by jet iteration, one filtration
    degree per pass.
    """
    import numpy as np

    names = sorted(images.keys())
    if not names:
        return {}
    ctx = images[names[0]].ctx
    m = len(names)
    A = np.zeros((m, m), dtype=complex)
    for r, v in enumerate(names):
        g = images[v]
        if g.ctx != ctx:
            raise SeriesError("images live in different contexts")
        if abs(g.constant_term()) > ctx.eps:
            raise SeriesError(f"image of {v!r} has nonzero constant term")
        for cidx, w in enumerate(names):
            A[r, cidx] = g.coefficient({w: 1})
        off_block = g
        for w in names:
            off_block = off_block - ctx.variable(w) * g.coefficient({w: 1})
        lin_leftover = any(
            ctx.weighted_degree(e) <= 1 and abs(c) > ctx.eps
            for e, c in off_block.terms.items())
        if lin_leftover:
            raise SeriesError(f"map image of {v!r} has linear part outside the block")
    if abs(np.linalg.det(A)) <= ctx.eps:
        raise SeriesError("singular linear part")
    Ainv = np.linalg.inv(A)

    def linear_solve(vec: list[TruncatedSeries]) -> dict[str, TruncatedSeries]:
        return {v: sum((vec[j] * Ainv[i, j] for j in range(m)), ctx.zero())
                for i, v in enumerate(names)}

    # residual part g_{>=2}
    higher = {}
    for v in names:
        g = images[v]
        lin = sum((ctx.variable(w) * g.coefficient({w: 1}) for w in names), ctx.zero())
        higher[v] = g - lin

    h = linear_solve([ctx.variable(v) for v in names])
    for _ in range(ctx.cap):
        sub = {v: compose(higher[v], h) for v in names}
        h = linear_solve([ctx.variable(v) - sub[v] for v in names])
    return h


# --- oscillatory scalars ------------------------------------------------------


class OscillatoryScalar:
    """An element ``e^{i a / h} * sum_k c_k h^k`` with finite Laurent part.

    The phase exponent ``a`` is stored exactly when handed in as a
    Fraction or int (flagged by :attr:`exact`); quarter turns of the
    central character are tracked separately as an integer mod 4.
    """

    __slots__ = ("exponent", "exact", "i_power", "laurent", "cap", "eps")

    def __init__(self, exponent=0, laurent: Mapping[int, complex] | None = None,
                 i_power: int = 0, cap: int = 16, eps: float = DEFAULT_EPS):
        if isinstance(exponent, (int, Fraction)):
            self.exponent = Fraction(exponent)
            self.exact = True
        else:
            self.exponent = float(exponent)
            self.exact = False
        self.cap = int(cap)
        self.eps = float(eps)
        self.i_power = int(i_power) % 4
        lau = {} if laurent is None else dict(laurent)
        clean = {}
        for k, c in lau.items():
            c = complex(c)
            if abs(c) < self.eps:
                continue
            if abs(2 * k) <= self.cap:
                clean[int(k)] = c
        self.laurent = clean

    @staticmethod
    def one(cap: int = 16, eps: float = DEFAULT_EPS) -> "OscillatoryScalar":
        return OscillatoryScalar(0, {0: 1.0}, cap=cap, eps=eps)

    def is_zero(self) -> bool:
        return not self.laurent

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            return OscillatoryScalar(
                self.exponent, {k: c * complex(other) for k, c in self.laurent.items()},
                self.i_power, self.cap, self.eps)
        if not isinstance(other, OscillatoryScalar):
            return NotImplemented
        if self.exact and other.exact:
            expo = self.exponent + other.exponent
        else:
            expo = float(self.exponent) + float(other.exponent)
        cap = min(self.cap, other.cap)
        out: dict[int, complex] = {}
        for k1, c1 in self.laurent.items():
            for k2, c2 in other.laurent.items():
                k = k1 + k2
                if abs(2 * k) > cap:
                    continue
                out[k] = out.get(k, 0.0) + c1 * c2
        return OscillatoryScalar(expo, out, self.i_power + other.i_power, cap,
                                 max(self.eps, other.eps))

    __rmul__ = __mul__

    def mul_i_power(self, k: int) -> "OscillatoryScalar":
        return OscillatoryScalar(self.exponent, self.laurent,
                                 self.i_power + k, self.cap, self.eps)

    def shift_phase(self, a) -> "OscillatoryScalar":
        if self.exact and isinstance(a, (int, Fraction)):
            expo = self.exponent + Fraction(a)
        else:
            expo = float(self.exponent) + float(a)
        return OscillatoryScalar(expo, self.laurent, self.i_power, self.cap, self.eps)

    def leading(self) -> tuple[int, complex]:
        """(hbar power, coefficient) of the lowest surviving order."""
        if not self.laurent:
            return (0, 0.0 + 0.0j)
        k = min(self.laurent)
        return k, self.laurent[k] * (1j ** self.i_power)

    def coefficient(self, k: int) -> complex:
        return self.laurent.get(k, 0.0 + 0.0j) * (1j ** self.i_power)

    def phase_value(self) -> float:
        return float(self.exponent)

    def is_close(self, other: "OscillatoryScalar", tol: float) -> bool:
        if abs(float(self.exponent) - float(other.exponent)) > tol:
            return False
        keys = set(self.laurent) | set(other.laurent)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= tol for k in keys)

    def to_json(self) -> dict:
        return {
            "exponent": {"num": self.exponent.numerator, "den": self.exponent.denominator}
            if self.exact else float(self.exponent),
            "exact": self.exact,
            "i_power": self.i_power,
            "laurent": [{"k": k, "re": c.real, "im": c.imag}
                        for k, c in sorted(self.laurent.items())],
        }

    @staticmethod
    def from_json(data: dict, cap: int = 16, eps: float = DEFAULT_EPS) -> "OscillatoryScalar":
        expo = data["exponent"]
        if isinstance(expo, dict):
            expo = Fraction(expo["num"], expo["den"])
        lau = {int(t["k"]): complex(t["re"], t["im"]) for t in data["laurent"]}
        return OscillatoryScalar(expo, lau, data.get("i_power", 0), cap, eps)

    def __repr__(self):
        return (f"<osc exp={self.exponent} i^{self.i_power} "
                f"laurent={ {k: round(abs(v), 6) for k, v in sorted(self.laurent.items())} }>")


# --- symmetric matrices -------------------------------------------------------


class SymmetricMatrix:
    """Symmetric matrix in one of two fixed modes: exact rational entries
    or complex floating entries."""

    __slots__ = ("n", "mode", "rows")

    def __init__(self, rows, mode: str | None = None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise SeriesError("matrix must be square")
        if mode is None:
            mode = "rational" if all(
                isinstance(x, (int, Fraction)) for r in rows for x in r) else "complex"
        if mode == "rational":
            rows = [[Fraction(x) for x in r] for r in rows]
            if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
                raise SeriesError("matrix is not symmetric")
        elif mode == "complex":
            rows = [[complex(x) for x in r] for r in rows]
            tol = 1e-12 * (1.0 + max((abs(x) for r in rows for x in r), default=0.0))
            if any(abs(rows[i][j] - rows[j][i]) > tol for i in range(n) for j in range(n)):
                raise SeriesError("matrix is not symmetric")
        else:
            raise SeriesError(f"unknown mode {mode!r}")
        self.n = n
        self.mode = mode
        self.rows = rows

    @staticmethod
    def identity(n: int, mode: str = "rational") -> "SymmetricMatrix":
        one = Fraction(1) if mode == "rational" else 1.0
        zero = Fraction(0) if mode == "rational" else 0.0
        return SymmetricMatrix([[one if i == j else zero for j in range(n)]
                                for i in range(n)], mode)

    @staticmethod
    def zero(n: int, mode: str = "rational") -> "SymmetricMatrix":
        z = Fraction(0) if mode == "rational" else 0.0
        return SymmetricMatrix([[z] * n for _ in range(n)], mode)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        if self.n != other.n:
            raise SeriesError("size mismatch")
        mode = "rational" if self.mode == other.mode == "rational" else "complex"
        return SymmetricMatrix([[self.rows[i][j] + other.rows[i][j]
                                 for j in range(self.n)] for i in range(self.n)], mode)

    def scale(self, c) -> "SymmetricMatrix":
        mode = self.mode if isinstance(c, (int, Fraction)) and self.mode == "rational" else "complex"
        return SymmetricMatrix([[self.rows[i][j] * c for j in range(self.n)]
                                for i in range(self.n)], mode)

    def to_numpy(self):
        import numpy as np
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)

    def to_json(self) -> dict:
        if self.mode == "rational":
            entries = [[[x.numerator, x.denominator] for x in r] for r in self.rows]
        else:
            entries = [[[x.real, x.imag] for x in r] for r in self.rows]
        return {"n": self.n, "mode": self.mode, "entries": entries}

    @staticmethod
    def from_json(data: dict) -> "SymmetricMatrix":
        if data["mode"] == "rational":
            rows = [[Fraction(a, b) for a, b in r] for r in data["entries"]]
        else:
            rows = [[complex(a, b) for a, b in r] for r in data["entries"]]
        return SymmetricMatrix(rows, data["mode"])

    def __repr__(self):
        return f"<sym {self.n}x{self.n} {self.mode} {self.rows}>"


def dump_canonical_json(obj, path=None) -> str:
    """Deterministic JSON encoding used for reports and fixtures."""
    text = json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
