"""Rate quadruples, case classification and the orientation convention.

The four intensities are named after the Poisson variables they drive:
``A_n ~ Poisson(n tau_a)`` and so on, with ``X_n = (A_n - B_n | A_n - B_n = C_n - D_n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

NAMES = ("a", "b", "c", "d")

# Adjacent pairs whose joint vanishing makes X_n identically 0.
ADJACENT_PAIRS = (("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"))


class RatesError(ValueError):
    """Invalid intensities (negative, non-finite, or unusable for the request)."""


@dataclass(frozen=True)
class Rates:
    tau_a: float
    tau_b: float
    tau_c: float
    tau_d: float

    def __post_init__(self):
        for name in NAMES:
            value = getattr(self, "tau_" + name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise RatesError(f"tau_{name} is not a number: {value!r}") from None
            if not math.isfinite(value) or value < 0:
                raise RatesError(f"tau_{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, "tau_" + name, value)

    @classmethod
    def of(cls, values) -> "Rates":
        """Build from any 4-sequence, or pass a ``Rates`` through."""
        if isinstance(values, cls):
            return values
        values = tuple(values)
        if len(values) != 4:
            raise RatesError(f"expected 4 intensities, got {len(values)}")
        return cls(*values)

    @classmethod
    def parse(cls, text: str) -> "Rates":
        """Parse a comma separated list ``"a,b,c,d"``."""
        parts = [p.strip() for p in text.split(",")]
        try:
            return cls.of(float(p) for p in parts)
        except ValueError as err:
            if isinstance(err, RatesError):
                raise
            raise RatesError(f"cannot parse rates from {text!r}") from None

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.tau_a, self.tau_b, self.tau_c, self.tau_d)

    def __iter__(self):
        return iter(self.astuple())

    def get(self, name: str) -> float:
        return getattr(self, "tau_" + name)

    @property
    def total(self) -> float:
        return self.tau_a + self.tau_b + self.tau_c + self.tau_d

    def swap_signs(self) -> "Rates":
        """Exchange A<->B and C<->D. Maps X_n to -X_n."""
        return Rates(self.tau_b, self.tau_a, self.tau_d, self.tau_c)

    def swap_pairs(self) -> "Rates":
        """Exchange A<->C and B<->D. Leaves the law of X_n unchanged."""
        return Rates(self.tau_c, self.tau_d, self.tau_a, self.tau_b)

    def pairwise_sums_positive(self) -> bool:
        return all(self.get(p) + self.get(q) > 0 for p, q in ADJACENT_PAIRS)


class Kind(Enum):
    DIRAC_ZERO = "dirac_zero"
    GENERIC = "generic"
    SINGLE_ZERO = "single_zero"
    OPPOSITE_PAIR_ZERO = "opposite_pair_zero"


@dataclass(frozen=True)
class CaseClass:
    """Case of the proposition a rate quadruple falls into.

    ``zero`` names the vanishing coefficient(s): one letter for
    ``SINGLE_ZERO``, ``"ac"`` or ``"bd"`` for ``OPPOSITE_PAIR_ZERO``, the
    first vanishing adjacent pair for ``DIRAC_ZERO`` and ``None`` otherwise.
    """

    kind: Kind
    zero: str | None = None

    @property
    def is_dirac(self) -> bool:
        return self.kind is Kind.DIRAC_ZERO

    def __str__(self):
        return self.kind.value if self.zero is None else f"{self.kind.value}({self.zero})"


def classify(rates) -> CaseClass:
    rates = Rates.of(rates)
    zeros = [name for name in NAMES if rates.get(name) == 0]
    for p, q in ADJACENT_PAIRS:
        if p in zeros and q in zeros:
            return CaseClass(Kind.DIRAC_ZERO, "".join(sorted(p + q)))
    if not zeros:
        return CaseClass(Kind.GENERIC)
    if len(zeros) == 1:
        return CaseClass(Kind.SINGLE_ZERO, zeros[0])
    # two zeros that are not adjacent can only be a diagonal
    return CaseClass(Kind.OPPOSITE_PAIR_ZERO, "".join(zeros))


@dataclass(frozen=True)
class Orientation:
    oriented_rates: Rates
    sign: int


def orient(rates) -> Orientation:
    """Swap A<->B, C<->D if needed so that ``tau_a tau_c >= tau_b tau_d``.

    Ties keep the input unchanged. ``sign`` is -1 when the swap was applied,
    in which case ``X_n`` of the oriented rates is ``-X_n`` of the input.
    """
    rates = Rates.of(rates)
    if rates.tau_a * rates.tau_c >= rates.tau_b * rates.tau_d:
        return Orientation(rates, 1)
    return Orientation(rates.swap_signs(), -1)


@dataclass(frozen=True)
class ScaledIntensities:
    n: int
    mu_a: float
    mu_b: float
    mu_c: float
    mu_d: float

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.mu_a, self.mu_b, self.mu_c, self.mu_d)


def check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def scale(rates, n: int) -> ScaledIntensities:
    rates = Rates.of(rates)
    n = check_n(n)
    mus = tuple(n * t for t in rates)
    if not all(math.isfinite(m) for m in mus):
        raise OverflowError(f"n * tau overflows for n={n}")
    return ScaledIntensities(n, *mus)
