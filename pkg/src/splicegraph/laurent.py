"""Integer Laurent polynomials in one variable ``t``."""

from __future__ import annotations

from typing import Iterable, Mapping


class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients.

    Instances are immutable; arithmetic returns new objects.  Zero coefficients
    are never stored.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None) -> None:
        c: dict[int, int] = {}
        for e, v in (coeffs or {}).items():
            if v:
                c[int(e)] = int(v)
        self._c = c

    @classmethod
    def from_list(cls, coeffs: Iterable[int], shift: int = 0) -> LaurentPoly:
        return cls({i + shift: v for i, v in enumerate(coeffs)})

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> LaurentPoly:
        return cls({exponent: coeff})

    @classmethod
    def one(cls) -> LaurentPoly:
        return cls({0: 1})

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def min_exp(self) -> int:
        return min(self._c)

    def max_exp(self) -> int:
        return max(self._c)

    def degree_span(self) -> int:
        return self.max_exp() - self.min_exp() if self._c else 0

    def leading(self) -> int:
        return self._c[self.max_exp()]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._c.items())))

    def __add__(self, other: LaurentPoly | int) -> LaurentPoly:
        other = _coerce(other)
        out = dict(self._c)
        for e, v in other._c.items():
            out[e] = out.get(e, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -v for e, v in self._c.items()})

    def __sub__(self, other: LaurentPoly | int) -> LaurentPoly:
        return self + (-_coerce(other))

    def __rsub__(self, other: LaurentPoly | int) -> LaurentPoly:
        return _coerce(other) - self

    def __mul__(self, other: LaurentPoly | int) -> LaurentPoly:
        other = _coerce(other)
        out: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + v1 * v2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("negative powers are only defined for monomials")
        result = LaurentPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def substitute_power(self, k: int) -> LaurentPoly:
        """Return ``f(t**k)``."""
        out: dict[int, int] = {}
        for e, v in self._c.items():
            out[e * k] = out.get(e * k, 0) + v
        return LaurentPoly(out)

    def evaluate(self, t: int):
        total = 0
        for e, v in self._c.items():
            total += v * (t**e if e >= 0 else 1 / t ** (-e))
        return total

    def divmod(self, divisor: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        """Long division over the integers after clearing the lowest powers of ``t``.

        Raises ``ArithmeticError`` if a leading coefficient does not divide.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly(), LaurentPoly()
        s, r = self.min_exp(), divisor.min_exp()
        rem = {e - s: v for e, v in self._c.items()}
        div = {e - r: v for e, v in divisor._c.items()}
        dtop = max(div)
        dlead = div[dtop]
        quot: dict[int, int] = {}
        while rem and max(rem) >= dtop:
            top = max(rem)
            c, m = divmod(rem[top], dlead)
            if m:
                raise ArithmeticError("inexact integer division")
            shift = top - dtop
            quot[shift] = c
            for e, v in div.items():
                k = e + shift
                rem[k] = rem.get(k, 0) - c * v
                if rem[k] == 0:
                    del rem[k]
        q = LaurentPoly({e + s - r: v for e, v in quot.items()})
        return q, LaurentPoly({e + s: v for e, v in rem.items()})

    def exact_div(self, divisor: LaurentPoly) -> LaurentPoly:
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise ArithmeticError(f"{divisor} does not divide {self}")
        return q

    def normalized(self) -> LaurentPoly:
        """Representative of the class modulo units ``±t^k``.

        Minimum exponent 0 and positive leading coefficient.
        """
        if not self._c:
            return self
        shift = self.min_exp()
        sign = 1 if self.leading() > 0 else -1
        return LaurentPoly({e - shift: sign * v for e, v in self._c.items()})

    def to_json(self) -> dict[str, int]:
        return {str(e): v for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> LaurentPoly:
        return cls({int(e): int(v) for e, v in data.items()})

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts: list[str] = []
        for i, e in enumerate(sorted(self._c)):
            v = self._c[e]
            mag = abs(v)
            if e == 0:
                mono = str(mag)
            else:
                power = "t" if e == 1 else f"t^{e}"
                mono = power if mag == 1 else f"{mag}*{power}"
            if i == 0:
                parts.append(mono if v > 0 else f"-{mono}")
            else:
                parts.append(("+ " if v > 0 else "- ") + mono)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _coerce(x: LaurentPoly | int) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly({0: int(x)})
