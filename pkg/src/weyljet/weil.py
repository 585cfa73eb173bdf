"""Formal Weil representation on Gaussian jets.

A Gaussian jet is ``scalar * exp(i T u^2 / 2h) * amplitude(u, h)``.  Mode
``weil`` keeps ``Im T`` positive definite (action everywhere defined);
mode ``weil0`` keeps ``T`` real, where the Fourier generator is only
partially defined and signals undefined elements instead of guessing a
branch.  Scalars track an exact phase exponent, a Laurent series in ``h``
and the central character as a power of ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .series import (OscillatoryScalar, SeriesContext, SeriesError,
                     TruncatedSeries)
from .stationary import fiber_stationary_phase, gaussian_prefactor, HBAR


class UndefinedWeilActionError(SeriesError):
    def __init__(self, message, step=None):
        super().__init__(message + ("" if step is None else f" (word step {step})"))
        self.step = step


def jet_context(n: int, cap: int, eps: float = 1e-9) -> SeriesContext:
    names = [f"u{i+1}" for i in range(n)] + [HBAR]
    return SeriesContext(names, [1] * n + [2], cap, eps, laurent={HBAR})


class GaussianJet:
    """exp(i T u^2/2h) times an amplitude in the position jets."""

    __slots__ = ("mode", "n", "ctx", "T", "amplitude", "scalar")

    def __init__(self, mode: str, T, amplitude: TruncatedSeries,
                 scalar: OscillatoryScalar | None = None):
        if mode not in ("weil", "weil0"):
            raise SeriesError("mode must be 'weil' or 'weil0'")
        self.mode = mode
        self.ctx = amplitude.ctx
        self.n = len([v for v in self.ctx.variables if v != HBAR])
        T = np.asarray(T, dtype=complex).reshape(self.n, self.n)
        if np.max(np.abs(T - T.T)) > 1e-12:
            raise SeriesError("T must be symmetric")
        if mode == "weil":
            im = (T - T.conj().T) / 2j
            vals = np.linalg.eigvalsh(im.real)
            if np.min(vals) <= 0:
                raise SeriesError("mode weil requires Im T positive definite")
        else:
            if np.max(np.abs(T.imag)) > 1e-12:
                raise SeriesError("mode weil0 requires real T")
        self.T = T
        self.amplitude = amplitude
        self.scalar = OscillatoryScalar.one(cap=self.ctx.cap) if scalar is None else scalar

    def vars(self) -> list[str]:
        return [v for v in self.ctx.variables if v != HBAR]

    def with_parts(self, T=None, amplitude=None, scalar=None, mode=None) -> "GaussianJet":
        return GaussianJet(self.mode if mode is None else mode,
                           self.T if T is None else T,
                           self.amplitude if amplitude is None else amplitude,
                           self.scalar if scalar is None else scalar)

    def flattened(self) -> tuple[np.ndarray, float, TruncatedSeries]:
        """(T, phase exponent, scalar Laurent folded into the amplitude)."""
        amp = self.ctx.zero()
        for k, c in self.scalar.laurent.items():
            amp = amp + (self.amplitude * c).shift_exponent(HBAR, k)
        amp = amp * (1j ** self.scalar.i_power)
        return self.T, float(self.scalar.exponent), amp

    def is_close(self, other: "GaussianJet", tol: float = 1e-9) -> bool:
        T1, e1, a1 = self.flattened()
        T2, e2, a2 = other.flattened()
        return (np.max(np.abs(T1 - T2)) <= tol and abs(e1 - e2) <= tol
                and a1.distance(a2) <= tol)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "T": [[[self.T[i, j].real, self.T[i, j].imag] for j in range(self.n)]
                  for i in range(self.n)],
            "scalar": self.scalar.to_json(),
            "amplitude": self.amplitude.to_json(),
        }

    @staticmethod
    def from_json(data: dict, eps: float = 1e-9) -> "GaussianJet":
        amp = TruncatedSeries.from_json(data["amplitude"], eps=eps, laurent={HBAR})
        T = np.array([[complex(a, b) for a, b in row] for row in data["T"]])
        scal = OscillatoryScalar.from_json(data["scalar"], cap=amp.ctx.cap, eps=eps)
        return GaussianJet(data["mode"], T, amp, scal)

    def __repr__(self):
        return f"<jet {self.mode} T={np.round(self.T, 4).tolist()} amp={self.amplitude!r}>"


# --- generators ----------------------------------------------------------------


@dataclass(frozen=True)
class Shear:
    A: tuple  # real symmetric, row tuples

    def matrix(self, n):
        A = np.asarray(self.A, dtype=float).reshape(n, n)
        return np.block([[np.eye(n), A], [np.zeros((n, n)), np.eye(n)]])


@dataclass(frozen=True)
class Linear:
    B: tuple  # real invertible, row tuples

    def matrix(self, n):
        B = np.asarray(self.B, dtype=float).reshape(n, n)
        Binv = np.linalg.inv(B)
        return np.block([[B, np.zeros((n, n))], [np.zeros((n, n)), Binv.T]])


@dataclass(frozen=True)
class Fourier:
    variables: tuple | None = None  # None = all

    def matrix(self, n):
        if self.variables is not None and len(self.variables) != n:
            raise SeriesError("partial Fourier has no single Sp matrix on the full block")
        return np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])


@dataclass(frozen=True)
class Central:
    power: int = 1


SpWord = list


def word_matrix(word: Sequence, n: int) -> np.ndarray:
    """Projection to Sp of a word; entries act in list order, so the
    matrix is the reversed product."""
    M = np.eye(2 * n)
    for g in word:
        if isinstance(g, Central):
            continue
        M = g.matrix(n) @ M
    return M


def _mat(x, n):
    return np.asarray(x, dtype=float).reshape(n, n)


def act_shear(A, jet: GaussianJet) -> GaussianJet:
    Am = _mat(A, jet.n)
    if np.max(np.abs(Am - Am.T)) > 1e-12:
        raise SeriesError("shear matrix must be symmetric")
    return jet.with_parts(T=jet.T + Am)


def act_gl(B, jet: GaussianJet) -> GaussianJet:
    Bm = _mat(B, jet.n)
    det = np.linalg.det(Bm)
    if abs(det) <= jet.ctx.eps:
        raise SeriesError("singular linear substitution")
    Binv = np.linalg.inv(Bm)
    T2 = Binv.T @ jet.T @ Binv
    T2 = (T2 + T2.T) / 2
    uvars = jet.vars()
    images = {}
    for j, vj in enumerate(uvars):
        s = jet.ctx.zero()
        for i, vi in enumerate(uvars):
            if abs(Binv[j, i]) > 1e-15:
                s = s + jet.ctx.variable(vi) * Binv[j, i]
        images[vj] = s
    from .series import compose
    amp = compose(jet.amplitude, images)
    scal = jet.scalar * (abs(det) ** -0.5)
    return jet.with_parts(T=T2, amplitude=amp, scalar=scal)


def act_fourier(variables, jet: GaussianJet) -> GaussianJet:
    """(Partial) Fourier transform on a block of position jets.

    In mode ``weil0`` the transformed block of ``T`` must be invertible;
    otherwise the representation is undefined at this element and an
    :class:`UndefinedWeilActionError` is raised.
    """
    uvars = jet.vars()
    block = list(uvars if variables is None else variables)
    if not block:
        return jet
    sel = [uvars.index(v) for v in block]
    keep = [i for i in range(jet.n) if i not in sel]
    Tss = jet.T[np.ix_(sel, sel)]
    if abs(np.linalg.det(Tss)) <= jet.ctx.eps:
        if jet.mode == "weil0":
            raise UndefinedWeilActionError(
                "Fourier block of T is degenerate: action undefined at this element")
        raise SeriesError("degenerate Fourier block in mode weil")

    ctx = jet.ctx
    zvars = [f"_z{i}" for i in range(len(sel))]
    ext = SeriesContext(list(ctx.variables) + zvars,
                        list(ctx.weights) + [1] * len(zvars),
                        ctx.cap, ctx.eps, laurent=ctx.laurent,
                        base_cap=ctx.base_cap)
    # phase: (1/2) y^t T y with the integrated block renamed to z, plus z.u_new
    phase = ext.zero()

    def old_var(i):
        return zvars[sel.index(i)] if i in sel else uvars[i]

    for i in range(jet.n):
        for j in range(i, jet.n):
            c = jet.T[i, i] / 2 if i == j else jet.T[i, j]
            if abs(c) > 1e-15:
                mono = {old_var(i): 2} if i == j else {old_var(i): 1, old_var(j): 1}
                # collapse duplicate keys when i != j but same name (cannot happen)
                phase = phase + ext.monomial(mono, c)
    for zi, i in zip(zvars, sel):
        phase = phase + ext.monomial({zi: 1, uvars[i]: 1}, 1.0)
    amp = jet.amplitude.map_vars({uvars[i]: zvars[k] for k, i in enumerate(sel)}, ext)
    reduced, pref, out, _ = fiber_stationary_phase(phase, amp, zvars)
    # prefactor from the engine carries the pinned branch for the block
    T2 = np.zeros((jet.n, jet.n), dtype=complex)
    for i in range(jet.n):
        for j in range(i, jet.n):
            c = reduced.coefficient({uvars[i]: 2}) * 2 if i == j \
                else reduced.coefficient({uvars[i]: 1, uvars[j]: 1})
            T2[i, j] = c
            T2[j, i] = c
    quad_check = reduced
    for i in range(jet.n):
        for j in range(i, jet.n):
            c = T2[i, i] / 2 if i == j else T2[i, j]
            if abs(c) > 1e-15:
                mono = {uvars[i]: 2} if i == j else {uvars[i]: 1, uvars[j]: 1}
                quad_check = quad_check - ext.monomial(mono, c)
    if quad_check.max_abs() > 1e3 * ctx.eps:
        raise SeriesError("Fourier of a Gaussian jet produced a non-quadratic phase")
    mode = jet.mode
    if mode == "weil0" and np.max(np.abs(T2.imag)) > 1e-9:
        mode = "weil"
    return GaussianJet(mode, T2, out.map_vars({}, ctx), jet.scalar * pref)


def act_central(power: int, jet: GaussianJet) -> GaussianJet:
    return jet.with_parts(scalar=jet.scalar.mul_i_power(power))


def act_generator(g, jet: GaussianJet) -> GaussianJet:
    if isinstance(g, Shear):
        return act_shear(g.A, jet)
    if isinstance(g, Linear):
        return act_gl(g.B, jet)
    if isinstance(g, Fourier):
        return act_fourier(g.variables, jet)
    if isinstance(g, Central):
        return act_central(g.power, jet)
    raise SeriesError(f"unknown generator {g!r}")


def act_word(word: Sequence, jet: GaussianJet) -> GaussianJet:
    """Apply the word generator by generator, first entry first; an
    undefined step re-raises with its index."""
    out = jet
    for k, g in enumerate(word):
        try:
            out = act_generator(g, out)
        except UndefinedWeilActionError as exc:
            raise UndefinedWeilActionError(str(exc.args[0]).split(" (word step")[0],
                                           step=k) from None
    return out


# --- canonical refactorization -------------------------------------------------


def factor_sp(M: np.ndarray) -> SpWord:
    """Factor a symplectic matrix with invertible lower-left block as
    Shear(A) Linear(B) Fourier Shear(C); entries act in list order."""
    m = M.shape[0] // 2
    P, Q = M[:m, :m], M[:m, m:]
    R, S = M[m:, :m], M[m:, m:]
    if abs(np.linalg.det(R)) < 1e-9:
        raise SeriesError("lower-left block not invertible: word not factorable here")
    B = -np.linalg.inv(R).T
    A = P @ np.linalg.inv(R)
    C = np.linalg.inv(R) @ S
    for X in (A, C):
        if np.max(np.abs(X - X.T)) > 1e-8:
            raise SeriesError("factorization produced a non-symmetric shear")
    A = (A + A.T) / 2
    C = (C + C.T) / 2
    word = [Shear(tuple(map(tuple, C))), Fourier(None),
            Linear(tuple(map(tuple, B))), Shear(tuple(map(tuple, A)))]
    return word


def jets_equal_mod_center(a: GaussianJet, b: GaussianJet, tol: float = 1e-8):
    """Compare jets up to a central scalar in {1, i, -1, -i}.

    Returns (ok, lambda, residual)."""
    T1, e1, a1 = a.flattened()
    T2, e2, b1 = b.flattened()
    if np.max(np.abs(T1 - T2)) > tol or abs(e1 - e2) > tol:
        return False, None, float("inf")
    if b1.is_zero() and a1.is_zero():
        return True, 1.0, 0.0
    if b1.is_zero() or a1.is_zero():
        return False, None, float("inf")
    lead = max(b1.terms, key=lambda k: abs(b1.terms[k]))
    lam = a1.terms.get(lead, 0.0) / b1.terms[lead]
    best = min([1, 1j, -1, -1j], key=lambda c: abs(lam - c))
    resid = (a1 - b1 * best).max_abs()
    return resid <= tol * max(1.0, a1.max_abs()), best, resid
