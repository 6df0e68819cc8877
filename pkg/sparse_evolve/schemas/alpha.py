from fractions import Fraction
from math import gcd
from typing import Any

from pydantic import BaseModel, ConfigDict, model_serializer, model_validator


class Alpha(BaseModel):
    """
    Exact rational edge-probability exponent, always stored reduced.

    Accepts `Alpha(numerator=3, denominator=4)`, the interchange string
    `"3/4"`, a `Fraction` or an int. Serializes back to `"p/q"`.
    """
    model_config = ConfigDict(frozen=True)

    numerator: int
    denominator: int

    @model_validator(mode="before")
    @classmethod
    def coerce(cls, data: Any) -> Any:
        if isinstance(data, Alpha):
            return {"numerator": data.numerator, "denominator": data.denominator}
        if isinstance(data, Fraction):
            return {"numerator": data.numerator, "denominator": data.denominator}
        if isinstance(data, str):
            text = data.strip()
            if "/" in text:
                num, _, den = text.partition("/")
            else:
                num, den = text, "1"
            try:
                return {"numerator": int(num), "denominator": int(den)}
            except ValueError:
                raise ValueError(f"alpha must look like 'p/q', got {data!r}")
        return data

    @model_validator(mode="after")
    def reduce(self) -> "Alpha":
        if self.denominator <= 0:
            raise ValueError("alpha denominator must be positive")
        if self.numerator < 0:
            raise ValueError("alpha numerator must be nonnegative")
        g = gcd(self.numerator, self.denominator)
        if g > 1:
            object.__setattr__(self, "numerator", self.numerator // g)
            object.__setattr__(self, "denominator", self.denominator // g)
        if not 0 < self.numerator < self.denominator:
            raise ValueError(f"alpha must lie strictly in (0,1), got {self}")
        return self

    @model_serializer
    def as_text(self) -> str:
        return str(self)

    @classmethod
    def parse(cls, value: Any) -> "Alpha":
        return cls.model_validate(value)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Alpha):
            return (self.numerator, self.denominator) == (other.numerator, other.denominator)
        return NotImplemented
