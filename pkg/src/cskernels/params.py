"""Parameter algebra for the degenerate operator

    L = D_yy + (c/y) D_y - b / y**2

on the half-line, and for the weighted spaces L^p_m = L^p((0, inf), y^m dy).

Everything here is closed-form arithmetic on plain values.  Comparisons are
exact IEEE comparisons on purpose: the classification conditions are strict or
non-strict inequalities and callers who want slack should perturb inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional


class NegativeDiscriminant(ValueError):
    """Raised when D = b + ((c-1)/2)^2 < 0 (no real indicial roots)."""

    def __init__(self, D: float):
        super().__init__(f"negative discriminant D={D!r}")
        self.D = D


class OutsideGenerationWindow(ValueError):
    def __init__(self, q: float, window: tuple[float, float]):
        super().__init__(f"q={q!r} outside generation window {window!r}")
        self.q = q
        self.window = window


class InvalidMeasure(ValueError):
    pass


class Unbounded(ArithmeticError):
    """The Hardy-type operator is not bounded for these parameters."""


@dataclass(frozen=True)
class OperatorParams:
    """Coefficients ``(b, c)``; the discriminant and roots are recomputed on demand."""

    b: float
    c: float

    @property
    def D(self) -> float:
        return self.b + ((self.c - 1.0) / 2.0) ** 2

    @property
    def sqrt_D(self) -> float:
        D = self.D
        if D < 0:
            raise NegativeDiscriminant(D)
        return math.sqrt(D)

    @property
    def s1(self) -> float:
        return indicial_roots(self).s1

    @property
    def s2(self) -> float:
        return indicial_roots(self).s2

    @property
    def is_bessel(self) -> bool:
        return self.b == 0.0


@dataclass(frozen=True)
class SpaceParams:
    """Weighted Lebesgue space data: ambient dimension, weight power, exponent."""

    m: float
    p: float
    dim: int = 1

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"exponent p must lie in (1, inf), got {self.p!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")

    @property
    def q(self) -> float:
        """Homogeneity index (m+1)/p."""
        return (self.m + 1.0) / self.p

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class Realization(enum.Enum):
    """Realizations of the general operator that have explicit kernels."""

    STANDARD = "standard"
    ALTERNATE = "alternate"


class Roots(NamedTuple):
    D: float
    s1: float
    s2: float


def indicial_roots(op: OperatorParams) -> Roots:
    """Roots of -s^2 + (c-1) s + b = 0, ordered s1 <= s2."""
    D = op.D
    if D < 0:
        raise NegativeDiscriminant(D)
    half = (op.c - 1.0) / 2.0
    r = math.sqrt(D)
    return Roots(D, half - r, half + r)


def generation_interval(op: OperatorParams) -> tuple[float, float]:
    """Open window ``(s1, s2 + 2)`` for the homogeneity index (m+1)/p."""
    _, s1, s2 = indicial_roots(op)
    return (s1, s2 + 2.0)


def in_generation_window(op: OperatorParams, sp: SpaceParams) -> bool:
    lo, hi = generation_interval(op)
    return lo < sp.q < hi


@dataclass(frozen=True)
class RealizationClass:
    maximal: bool
    minimal: bool
    unique: bool
    alternate_exists: bool


def classify_realization(op: OperatorParams, sp: SpaceParams) -> RealizationClass:
    """Classify the realization of L in L^p_m.

    ``maximal``   s1 < q <= s2
    ``minimal``   s1 + 2 <= q < s2 + 2
    ``unique``    fails only when 0 <= D < 1 and s2 < q < s1 + 2
    ``alternate_exists``  0 < D < 1 and s2 < q < s1 + 2
    """
    D, s1, s2 = indicial_roots(op)
    q = sp.q
    window = (s1, s2 + 2.0)
    if not (window[0] < q < window[1]):
        raise OutsideGenerationWindow(q, window)
    in_gap = s2 < q < s1 + 2.0
    return RealizationClass(
        maximal=s1 < q <= s2,
        minimal=s1 + 2.0 <= q < s2 + 2.0,
        unique=not (0.0 <= D < 1.0 and in_gap),
        alternate_exists=(0.0 < D < 1.0) and in_gap,
    )


def similarity_shift(
    op: OperatorParams, sp: SpaceParams, k: float
) -> tuple[OperatorParams, SpaceParams]:
    """Parameters after conjugating with multiplication by y^k.

    b -> b - k (c + k - 1), c -> c + 2k, m -> m + k p.  The discriminant is
    unchanged and both roots move by +k.
    """
    b_new = op.b - k * (op.c + k - 1.0)
    return (
        OperatorParams(b=b_new, c=op.c + 2.0 * k),
        SpaceParams(m=sp.m + k * sp.p, p=sp.p, dim=sp.dim),
    )


@dataclass(frozen=True)
class RellichParams:
    gamma_p: float
    parabola_vertex: float
    degenerate_axis: bool
    in_parabola: bool
    best_constant: Optional[float]


def rellich_gamma(c: float, p: float) -> float:
    p_conj = p / (p - 1.0)
    return (1.0 / p - 2.0) * (1.0 / p_conj + c)


def rellich_constants(op: OperatorParams, sp: SpaceParams) -> RellichParams:
    """Rellich data for ``||y^-2 u||_p <= C ||L u||_p``.

    The exceptional set is the parabola {-xi^2 + i xi (3 - 2/p + c) - gamma_p};
    its real points are the vertex alone, unless the imaginary coefficient
    vanishes, in which case it is the half-line (-inf, -gamma_p].
    ``best_constant`` is only reported inside the window s1+2 < 1/p < s2+2.
    """
    p = sp.p
    gamma = rellich_gamma(op.c, p)
    degenerate = (3.0 - 2.0 / p + op.c) == 0.0
    inv_p = 1.0 / p
    D = op.D
    best = None
    if D >= 0:
        _, s1, s2 = indicial_roots(op)
        inside = s1 + 2.0 < inv_p < s2 + 2.0
        if degenerate:
            in_parabola = not inside
        else:
            in_parabola = inv_p in (s1 + 2.0, s2 + 2.0)
        if inside:
            best = 1.0 / (op.b + gamma)
    else:
        # b + gamma_p = D - (1/p - 2 - (c-1)/2)^2 < 0 here
        in_parabola = degenerate
    return RellichParams(
        gamma_p=gamma,
        parabola_vertex=-gamma,
        degenerate_axis=degenerate,
        in_parabola=in_parabola,
        best_constant=best,
    )


@dataclass(frozen=True)
class MuckenhouptClass:
    in_Ap: bool
    in_RHr: Optional[bool] = None


def muckenhoupt_radial(
    M: int, m: float, k: float, p: float, r: Optional[float] = None
) -> MuckenhouptClass:
    """Membership of |y|^k in A_p (and RH_r) with respect to |y|^m dy on R^M."""
    hom = M + m
    if hom <= 0:
        raise InvalidMeasure(f"M + m must be positive, got {hom!r}")
    if p < 1:
        raise ValueError("p must be >= 1")
    upper = hom * (p - 1.0)
    in_ap = -hom < k < upper
    in_rh = None
    if r is not None:
        if r < 1:
            raise ValueError("r must be >= 1")
        in_rh = -hom / r < k < upper
    return MuckenhouptClass(in_Ap=in_ap, in_RHr=in_rh)


def hardy_constant(c: float, sp: SpaceParams, which: str) -> float:
    """Norm bound of the Hardy operators on L^p_m.

    H1 f(y) = y^{-c-1} int_0^y f(s) s^c ds,  bounded iff c + 1 > q
    H2 f(y) = y^{-c-1} int_y^inf f(s) s^c ds, bounded iff c + 1 < q
    """
    q = sp.q
    which = which.upper()
    if which == "H1":
        if c + 1.0 > q:
            return 1.0 / ((c + 1.0) - q)
    elif which == "H2":
        if c + 1.0 < q:
            return 1.0 / (q - (c + 1.0))
    else:
        raise ValueError(f"unknown Hardy operator {which!r}")
    raise Unbounded(f"{which} unbounded for c={c}, q={q}")
