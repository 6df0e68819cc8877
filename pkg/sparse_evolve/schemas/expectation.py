import enum
from fractions import Fraction
from typing import Annotated, Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator

from sparse_evolve.schemas.alpha import Alpha
from sparse_evolve.schemas.extension import RootedExtension


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"expected a rational like 'p/q', got {value!r}")
    raise ValueError(f"expected a rational like 'p/q', got {value!r}")


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


# exact rational that travels as "p/q"
Rational = Annotated[
    Fraction,
    PlainValidator(_to_fraction),
    PlainSerializer(_fraction_text, return_type=str),
]


class Regime(str, enum.Enum):
    GROWS_WITH_T = "grows-with-T"
    TAIL_DECAYS = "tail-decays"


class ExponentVector(BaseModel):
    """(alpha_1, ..., alpha_n) with alpha_i = alpha * e_i."""
    model_config = ConfigDict(frozen=True)

    alphas: Tuple[Rational, ...]

    @field_validator("alphas")
    @classmethod
    def nonnegative(cls, v: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
        if any(a < 0 for a in v):
            raise ValueError("exponents must be nonnegative")
        return v

    @classmethod
    def of(cls, values) -> "ExponentVector":
        return cls(alphas=tuple(Fraction(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def window(self, start: int, length: int) -> Fraction:
        """length - (alpha_{start+1} + ... + alpha_{start+length}), 0-based start."""
        return length - sum(self.alphas[start:start + length], Fraction(0))

    def degenerate_window(self) -> Optional[Tuple[int, int]]:
        for start in range(self.n):
            running = Fraction(0)
            for length in range(1, self.n - start + 1):
                running += self.alphas[start + length - 1]
                if running == length:
                    return start, length
        return None

    @property
    def is_degenerate(self) -> bool:
        return self.degenerate_window() is not None


class CoefficientTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    c: Tuple[Rational, ...]
    T_exponents: Tuple[Rational, ...]
    tau0_exponents: Tuple[Rational, ...]


class ThetaTerm(BaseModel):
    subset: List[int] = Field(..., description="extension vertices placed before the cut")
    coefficient: Rational
    T_exponent: Rational
    tau0_exponent: Rational


class ThetaForm(BaseModel):
    terms: List[ThetaTerm]
    dominant_T_exponent: Rational
    dominant_subsets: List[List[int]]
    regime: Regime

    def term(self, subset) -> ThetaTerm:
        key = sorted(subset)
        for t in self.terms:
            if t.subset == key:
                return t
        raise KeyError(key)


class ClosedExpectation(BaseModel):
    value: float
    theta: ThetaForm


class AsymptoticExponent(BaseModel):
    regime: Regime
    exponent: Rational


class SandwichBounds(BaseModel):
    """Bounds around sum_{s=tau0+1}^{T} s^(-beta)."""
    upper: float
    exact: float
    lower: float
    scaled_lower: float


class ExpectationQuery(BaseModel):
    extension: RootedExtension
    alpha: Alpha
    tau0: int = Field(..., ge=0)
    T: int = Field(..., ge=1)
