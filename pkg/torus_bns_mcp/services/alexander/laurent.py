from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from sympy import Poly, symbols

S = symbols("s")


@dataclass(slots=True, frozen=True)
class LaurentPolynomial:
    """Integer Laurent polynomial in s; ``terms`` are (exponent, coefficient) pairs, sorted, nonzero."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coefficients: Mapping[int, int]) -> LaurentPolynomial:
        return cls(tuple(sorted((e, c) for e, c in coefficients.items() if c != 0)))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> LaurentPolynomial:
        return cls.from_dict({exponent: coefficient})

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def __add__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        total = self.as_dict()
        for exponent, coefficient in other.terms:
            total[exponent] = total.get(exponent, 0) + coefficient
        return LaurentPolynomial.from_dict(total)

    def __neg__(self) -> LaurentPolynomial:
        return LaurentPolynomial(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        return self + (-other)

    def __mul__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        product: dict[int, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                product[e1 + e2] = product.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial.from_dict(product)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_exponent(self) -> int:
        return self.terms[0][0] if self.terms else 0

    @property
    def max_exponent(self) -> int:
        return self.terms[-1][0] if self.terms else 0

    @property
    def degree(self) -> int:
        """Exponent span; 0 for the zero polynomial."""
        return self.max_exponent - self.min_exponent

    def shifted(self, amount: int) -> LaurentPolynomial:
        return LaurentPolynomial(tuple((e + amount, c) for e, c in self.terms))

    def normalized(self) -> LaurentPolynomial:
        """Unit representative: lowest exponent 0, positive leading coefficient."""
        if self.is_zero:
            return self
        shifted = self.shifted(-self.min_exponent)
        return -shifted if shifted.terms[-1][1] < 0 else shifted

    def to_poly(self) -> Poly:
        """Ordinary polynomial after shifting the lowest exponent to 0."""
        shifted = self.shifted(-self.min_exponent)
        return Poly(sum((c * S**e for e, c in shifted.terms), start=0), S, domain="ZZ")

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> LaurentPolynomial:
        return cls.from_dict({exponent + shift: int(c) for (exponent,), c in poly.terms()})

    def format(self) -> str:
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for exponent, coefficient in reversed(self.terms):
            if exponent == 0:
                body = str(abs(coefficient))
            else:
                power = "s" if exponent == 1 else f"s^{exponent}"
                body = power if abs(coefficient) == 1 else f"{abs(coefficient)}*{power}"
            sign = "-" if coefficient < 0 else "+"
            parts.append(body if not parts and sign == "+" else (f"-{body}" if not parts else f"{sign} {body}"))
        return " ".join(parts)
