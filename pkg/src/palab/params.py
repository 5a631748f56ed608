"""Model parameters for the affine preferential-attachment family.

Three growth variants share the attachment weight ``degree + delta``:

* variant "a": one edge per new vertex, self-loops allowed,
* variant "b": one edge per new vertex, no self-loops,
* variant "c": m independent edges per new vertex, degrees frozen
  during the step.

Variants "a" and "b" with m > 1 are defined by running the m = 1
process with delta' = delta / m and collapsing blocks of m consecutive
vertices; see :mod:`palab.growth`.

delta is kept as an exact rational throughout so that attachment
probabilities can be realized with integer arithmetic (no floating
point approximation in the sampling law).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

VARIANTS = ("a", "b", "c")

DeltaLike = Union[int, float, str, Fraction]


def as_fraction(delta: DeltaLike) -> Fraction:
    """Convert a delta argument to an exact Fraction.

    Accepts ints, strings like "-1/2", Fractions, and floats.  A float
    is converted exactly (every float is a dyadic rational), so e.g.
    0.5 -> 1/2 while 0.1 becomes the 56-bit rational the float really is.
    """
    if isinstance(delta, Fraction):
        return delta
    if isinstance(delta, int):
        return Fraction(delta)
    if isinstance(delta, str):
        return Fraction(delta)
    if isinstance(delta, float):
        return Fraction(delta)
    raise TypeError(f"cannot interpret delta={delta!r} as a rational")


@dataclass(frozen=True)
class PAParams:
    """Variant + (m, delta) and the derived constants used everywhere else.

    Invariants enforced at construction: m >= 1 integer and
    delta > -m strictly (the attachment weights m + delta of fresh
    vertices must stay positive).
    """

    variant: str
    m: int
    delta: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        variant = self.variant.lower()
        object.__setattr__(self, "variant", variant)
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m!r}")
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.delta <= -self.m:
            raise ValueError(f"need delta > -m, got delta={self.delta}, m={self.m}")

    # -- exact derived rationals ------------------------------------------

    @property
    def delta_prime(self) -> Fraction:
        """delta/m, the offset of the m=1 process behind variants a/b."""
        return self.delta / self.m

    @property
    def tau_exact(self) -> Fraction:
        return 3 + self.delta_prime

    @property
    def a_exact(self) -> Fraction:
        return Fraction(self.m, 1) / (2 * self.m + self.delta)

    # -- float views -------------------------------------------------------

    @property
    def tau(self) -> float:
        """Power-law exponent 3 + delta/m of the degree distribution."""
        return float(self.tau_exact)

    @property
    def a(self) -> float:
        """Connection-probability exponent m/(2m+delta); lies in (0,1)."""
        return float(self.a_exact)

    @property
    def Delta(self) -> float:
        """(1+delta)/(2+delta), used by the m=1 degree bounds."""
        if 2 + self.delta == 0:
            raise ZeroDivisionError("Delta undefined at delta = -2")
        return float((1 + self.delta) / (2 + self.delta))

    @property
    def eta(self) -> float:
        """Connector-probability constant (m+delta)^2 / (2m(2m+delta))^2."""
        return float((self.m + self.delta) ** 2 / (2 * self.m * (2 * self.m + self.delta)) ** 2)

    @property
    def a_md(self) -> float:
        """Proper-tree constant (m+delta)/(3(2m+delta))."""
        return float((self.m + self.delta) / (3 * (2 * self.m + self.delta)))

    @property
    def m_delta(self) -> float:
        """m + 1 + delta, the per-vertex attachment mass bound."""
        return float(self.m + 1 + self.delta)

    # -- conveniences -------------------------------------------------------

    @property
    def delta_float(self) -> float:
        return float(self.delta)

    def m1_params(self) -> "PAParams":
        """Parameters of the underlying m=1 process for variants a/b.

        Variant c has no collapse construction; requesting its m=1
        reduction is a logic error.
        """
        if self.variant == "c":
            raise ValueError("variant c is generated directly; no m=1 reduction")
        return PAParams(self.variant, 1, self.delta_prime)

    def delta_as_ratio(self) -> tuple[int, int]:
        """(p, q) with delta = p/q and q > 0, for integer-exact sampling."""
        return self.delta.numerator, self.delta.denominator

    def label(self) -> str:
        return f"{self.variant}(m={self.m}, delta={self.delta})"


def make_params(variant: str, m: int, delta: DeltaLike) -> PAParams:
    """Validating constructor used by the CLI and config layers."""
    return PAParams(variant=variant, m=m, delta=as_fraction(delta))
