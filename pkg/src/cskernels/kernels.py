"""Closed-form heat kernels, gradient kernels and Green functions.

Every kernel handled here has the common shape (with respect to Lebesgue dρ)

    p(t, y, ρ) = (1/2t) y^{(1-c)/2} ρ^{(1+c)/2} exp(-(y²+ρ²)/4t) I_ν(yρ/2t)

and differs only in the Bessel order ν:

* pure Bessel operator, Neumann condition:   ν = (c-1)/2   (needs c > -1)
* pure Bessel operator, Dirichlet condition: ν = (1-c)/2   (needs c < 1)
* general operator, standard realization:   ν = +sqrt(D)
* general operator, alternate realization:  ν = -sqrt(D)   (needs 0 < D < 1)

Evaluation always goes through exp(-x) I_ν(x), so the exponentials are
combined into exp(-(y-ρ)²/4t) and nothing overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .params import BoundaryCondition, OperatorParams, Realization, indicial_roots
from .report import ProbeReport
from .specfun import bessel_i, bessel_i_ratio, bessel_k


class AdmissibilityError(ValueError):
    pass


class KernelDomainError(ValueError):
    pass


class FitFailure(RuntimeError):
    pass


Tag = Union[BoundaryCondition, Realization]


@dataclass(frozen=True)
class KernelSpec:
    op: OperatorParams
    bc: Tag = Realization.STANDARD
    # Bessel arguments above this are never exponentiated unscaled.  The
    # evaluation path below is scaled throughout, so this is informational.
    overflow_cap: float = 600.0

    @classmethod
    def neumann(cls, c: float) -> "KernelSpec":
        return cls(OperatorParams(0.0, c), BoundaryCondition.NEUMANN)

    @classmethod
    def dirichlet(cls, c: float) -> "KernelSpec":
        return cls(OperatorParams(0.0, c), BoundaryCondition.DIRICHLET)

    @classmethod
    def operator(cls, b: float, c: float, alternate: bool = False) -> "KernelSpec":
        tag = Realization.ALTERNATE if alternate else Realization.STANDARD
        return cls(OperatorParams(b, c), tag)

    # -- derived quantities -------------------------------------------------
    def check(self) -> None:
        c = self.op.c
        if self.bc is BoundaryCondition.NEUMANN:
            if self.op.b != 0:
                raise AdmissibilityError("Neumann kernel is defined for b = 0 only")
            if not c > -1:
                raise AdmissibilityError(f"Neumann kernel needs c > -1, got c={c}")
        elif self.bc is BoundaryCondition.DIRICHLET:
            if self.op.b != 0:
                raise AdmissibilityError("Dirichlet kernel is defined for b = 0 only")
            if not c < 1:
                raise AdmissibilityError(f"Dirichlet kernel needs c < 1, got c={c}")
        else:
            D = self.op.D
            if D < 0:
                raise AdmissibilityError(f"kernel needs D >= 0, got D={D}")
            if self.bc is Realization.ALTERNATE and not (0 < D < 1):
                raise AdmissibilityError(f"alternate realization needs 0 < D < 1, got D={D}")

    @property
    def order(self) -> float:
        c = self.op.c
        if self.bc is BoundaryCondition.NEUMANN:
            return (c - 1.0) / 2.0
        if self.bc is BoundaryCondition.DIRICHLET:
            return (1.0 - c) / 2.0
        r = math.sqrt(self.op.D)
        return -r if self.bc is Realization.ALTERNATE else r

    @property
    def y_power(self) -> float:
        return (1.0 - self.op.c) / 2.0

    @property
    def rho_power(self) -> float:
        return (1.0 + self.op.c) / 2.0

    @property
    def y_exponent_at_zero(self) -> float:
        """p behaves like y^e as y -> 0 (e = -s1 for the standard realization)."""
        return self.y_power + self.order

    @property
    def rho_exponent_at_zero(self) -> float:
        """p behaves like ρ^e as ρ -> 0."""
        return self.rho_power + self.order

    @property
    def is_conservative(self) -> bool:
        return self.bc is BoundaryCondition.NEUMANN or (
            self.bc is Realization.STANDARD and self.op.b == 0 and self.op.c >= 1
        )

    def describe(self) -> dict:
        return {"b": self.op.b, "c": self.op.c, "bc": self.bc.value, "order": self.order}


def _arrays(*args):
    arrs = [np.asarray(a, dtype=float) for a in args]
    scalar = all(a.ndim == 0 for a in arrs)
    return np.broadcast_arrays(*arrs), scalar


def _out(v, scalar):
    return float(v) if scalar else v


def log_heat_kernel(spec: KernelSpec, t, y, rho):
    """log p(t, y, ρ) for y, ρ, t > 0; finite even where p underflows."""
    spec.check()
    (t, y, rho), scalar = _arrays(t, y, rho)
    if np.any(t <= 0) or np.any(rho <= 0) or np.any(y <= 0):
        raise KernelDomainError("need t, y, rho > 0")
    z = y * rho / (2.0 * t)
    with np.errstate(divide="ignore"):
        log_i = np.log(bessel_i(spec.order, z, scaled=True))
    logp = (
        -np.log(2.0 * t)
        + spec.y_power * np.log(y)
        + spec.rho_power * np.log(rho)
        - (y - rho) ** 2 / (4.0 * t)
        + log_i
    )
    return _out(logp, scalar)


def heat_kernel(spec: KernelSpec, t, y, rho):
    """p(t, y, ρ) with respect to dρ.  ``y = 0`` returns the boundary limit."""
    spec.check()
    (t, y, rho), scalar = _arrays(t, y, rho)
    if np.any(t <= 0) or np.any(rho <= 0) or np.any(y < 0):
        raise KernelDomainError("need t > 0, rho > 0 and y >= 0")
    nu = spec.order
    out = np.empty(np.broadcast(t, y, rho).shape)
    pos = y > 0
    if np.any(pos):
        out[pos] = np.exp(log_heat_kernel(spec, t[pos], y[pos], rho[pos]))
    if np.any(~pos):
        tz, rz = t[~pos], rho[~pos]
        e = spec.y_exponent_at_zero
        if e > 0:
            lim = np.zeros_like(tz)
        elif e < 0:
            lim = np.full_like(tz, np.inf)
        else:
            # y^{-s1} I_nu(y rho / 2t) -> (rho/4t)^nu / Gamma(nu + 1)
            lim = np.exp(
                -np.log(2.0 * tz)
                + spec.rho_power * np.log(rz)
                - rz * rz / (4.0 * tz)
                + nu * np.log(rz / (4.0 * tz))
                - gammaln(nu + 1.0)
            )
        out[~pos] = lim
    return _out(out, scalar)


def log_derivative_y(spec: KernelSpec, t, y, rho):
    """D_y log p = (y_power + ν)/y - y/2t + (ρ/2t) I_{ν+1}/I_ν."""
    (t, y, rho), _ = _arrays(t, y, rho)
    z = y * rho / (2.0 * t)
    ratio = bessel_i_ratio(spec.order, z)
    return spec.y_exponent_at_zero / y - y / (2.0 * t) + rho / (2.0 * t) * ratio


def heat_kernel_dy(spec: KernelSpec, t, y, rho):
    """∂p/∂y for y > 0."""
    spec.check()
    (t, y, rho), scalar = _arrays(t, y, rho)
    if np.any(t <= 0) or np.any(rho <= 0) or np.any(y <= 0):
        raise KernelDomainError("need t, y, rho > 0")
    val = log_derivative_y(spec, t, y, rho) * heat_kernel(spec, t, y, rho)
    return _out(np.asarray(val), scalar)


def green_function(spec: KernelSpec, lam, y, rho):
    """Kernel of (λ - A)^{-1} with respect to dρ, for real λ > 0.

    y^{(1-c)/2} ρ^{(1+c)/2} I_ν(√λ min(y,ρ)) K_|ν|(√λ max(y,ρ)).
    """
    spec.check()
    (lam, y, rho), scalar = _arrays(lam, y, rho)
    if np.any(lam <= 0):
        raise KernelDomainError("need lambda > 0")
    if np.any(y <= 0) or np.any(rho <= 0):
        raise KernelDomainError("need y, rho > 0")
    nu = spec.order
    s = np.sqrt(lam)
    lo = s * np.minimum(y, rho)
    hi = s * np.maximum(y, rho)
    with np.errstate(divide="ignore"):
        logg = (
            spec.y_power * np.log(y)
            + spec.rho_power * np.log(rho)
            + np.log(bessel_i(nu, lo, scaled=True))
            + np.log(bessel_k(abs(nu), hi, scaled=True))
            + (lo - hi)
        )
    return _out(np.exp(logg), scalar)


def product_kernel(spec: KernelSpec, N: int, t, x1, y1, x2, y2):
    """Kernel of the (N+1)-dimensional problem: Gaussian in x times the 1D kernel."""
    if N < 0:
        raise ValueError("N must be >= 0")
    base = heat_kernel(spec, t, y1, y2)
    if N == 0:
        return base
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    d2 = np.sum((x1 - x2) ** 2, axis=-1) if x1.ndim or x2.ndim else (x1 - x2) ** 2
    t = np.asarray(t, dtype=float)
    gauss = (4.0 * np.pi * t) ** (-N / 2.0) * np.exp(-d2 / (4.0 * t))
    val = gauss * base
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# envelopes


@dataclass(frozen=True)
class EnvelopeParams:
    """C t^{t_power} (y/√t ∧ 1)^{a_y} (ρ/√t ∧ 1)^{a_rho} exp(-(y-ρ)²/(κ t))."""

    C: float
    kappa: float
    a_y: float
    a_rho: float
    t_power: float = -0.5

    def shape(self, t, y, rho):
        t, y, rho = (np.asarray(a, dtype=float) for a in (t, y, rho))
        st = np.sqrt(t)
        return (
            t ** self.t_power
            * np.minimum(y / st, 1.0) ** self.a_y
            * np.minimum(rho / st, 1.0) ** self.a_rho
            * np.exp(-((y - rho) ** 2) / (self.kappa * t))
        )

    def __call__(self, t, y, rho):
        return self.C * self.shape(t, y, rho)


def envelope_exponents(spec: KernelSpec, gradient: bool = False) -> tuple[float, float]:
    c = spec.op.c
    if spec.bc is BoundaryCondition.DIRICHLET:
        return (-c, 1.0) if gradient else (1.0 - c, 1.0)
    if spec.bc is BoundaryCondition.NEUMANN:
        return (1.0, c) if gradient else (0.0, c)
    _, s1, s2 = indicial_roots(spec.op)
    s = s2 if spec.bc is Realization.ALTERNATE else s1
    return (-s - 1.0, c - s) if gradient else (-s, c - s)


def envelope(spec: KernelSpec, kappa: float = 4.5, gradient: bool = False, C: float = 1.0):
    spec.check()
    a_y, a_rho = envelope_exponents(spec, gradient)
    return EnvelopeParams(C=C, kappa=kappa, a_y=a_y, a_rho=a_rho, t_power=-1.0 if gradient else -0.5)


def _envelope_fit_grid(n: int = 25):
    t = np.geomspace(1e-3, 1e3, n)
    y = np.geomspace(1e-3, 1e2, n)
    T, Y, R = np.meshgrid(t, y, y, indexing="ij")
    return T.ravel(), Y.ravel(), R.ravel()


def _log_ratio(spec, env, t, y, r, gradient):
    logk = log_heat_kernel(spec, t, y, r)
    if gradient:
        with np.errstate(divide="ignore"):
            logk = logk + np.log(np.abs(log_derivative_y(spec, t, y, r)))
    st = np.sqrt(t)
    log_env = (
        np.log(env.C)
        + env.t_power * np.log(t)
        + env.a_y * np.log(np.minimum(y / st, 1.0))
        + env.a_rho * np.log(np.minimum(r / st, 1.0))
        - (y - r) ** 2 / (env.kappa * t)
    )
    return logk, logk - log_env


def fit_envelope(spec: KernelSpec, kappa: float = 4.5, gradient: bool = False, n: int = 25):
    """Smallest C making the envelope dominate the kernel on a log grid.

    Ratios are formed in log space so that far-tail points, where both the
    kernel and the envelope underflow, still count.
    """
    env = envelope(spec, kappa, gradient)
    t, y, r = _envelope_fit_grid(n)
    logk, logratio = _log_ratio(spec, env, t, y, r, gradient)
    if not gradient and np.any(~np.isfinite(logk)):
        bad = int(np.argmin(np.where(np.isfinite(logk), np.inf, -np.inf)))
        raise FitFailure(f"kernel not positive at t={t[bad]}, y={y[bad]}, rho={r[bad]}")
    if np.any(np.isnan(logratio)) or np.any(logratio == np.inf):
        raise FitFailure("kernel/envelope ratio not finite on the fitting grid")
    return EnvelopeParams(C=float(np.exp(logratio.max())), kappa=kappa, a_y=env.a_y, a_rho=env.a_rho, t_power=env.t_power)


def envelope_check(
    spec: KernelSpec,
    n_samples: int = 100_000,
    kappa: float = 4.5,
    gradient: bool = False,
    margin: float = 0.05,
    seed: int = 0,
) -> ProbeReport:
    """Fit C on a grid, inflate it by ``margin`` and test it on scrambled Sobol points."""
    from scipy.stats import qmc

    fitted = fit_envelope(spec, kappa, gradient)
    env = EnvelopeParams(fitted.C * (1.0 + margin), kappa, fitted.a_y, fitted.a_rho, fitted.t_power)
    u = qmc.Sobol(3, scramble=True, seed=seed).random_base2(int(np.ceil(np.log2(n_samples))))[:n_samples]
    t = 10.0 ** (-3 + 6 * u[:, 0])
    y = 10.0 ** (-3 + 5 * u[:, 1])
    r = 10.0 ** (-3 + 5 * u[:, 2])
    logk, logratio = _log_ratio(spec, env, t, y, r, gradient)
    worst = float(np.exp(logratio.max()))
    rep = ProbeReport("envelope", config={"spec": spec.describe(), "kappa": kappa, "gradient": gradient})
    rep.add("fitted_C", fitted.C, np.isfinite(fitted.C) and fitted.C > 0)
    if not gradient:
        rep.add("positivity", int(np.sum(~np.isfinite(logk))), bool(np.all(np.isfinite(logk))), expected=0)
    rep.add("max_ratio_sampled", worst, worst <= 1.0, expected=1.0)
    return rep
