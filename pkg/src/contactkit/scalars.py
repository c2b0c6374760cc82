"""Exact complex scalars with rational real and imaginary parts.

These are the coefficients of the exact Laurent ring.  The class is a
thin pair of ``fractions.Fraction`` values with closed field arithmetic:
sums, products, quotients and integer powers of exact scalars are exact.
Mixing an exact scalar with a float or a Python complex raises
:class:`~contactkit.errors.VariantError`; conversion to binary floats is
always an explicit ``complex(q)`` call at the edge of a computation.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import VariantError

_EXACT_PARTS = (int, Fraction)


def _coerce_part(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise VariantError(
        f"exact scalar parts must be int, Fraction or rational string, got {type(value).__name__}"
    )


class QC:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _coerce_part(re))
        object.__setattr__(self, "im", _coerce_part(im))

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("QC values are immutable")

    # -- conversions ---------------------------------------------------

    def __complex__(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im

    @property
    def is_real(self) -> bool:
        return not self.im

    def conj(self) -> "QC":
        return QC(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _lift(other):
        if isinstance(other, QC):
            return other
        if isinstance(other, _EXACT_PARTS):
            return QC(other)
        if isinstance(other, (float, complex)):
            raise VariantError(
                "cannot mix exact scalars with binary floats; "
                "convert with complex(q) at the edge instead"
            )
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QC(o.re - self.re, o.im - self.im)

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "QC":
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("inverse of exact zero")
        return QC(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QC(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- comparison / hashing -------------------------------------------

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        return f"QC({self.re}, {self.im})"

    # -- text form used by the file format -------------------------------

    def part_strings(self) -> tuple[str, str]:
        """Render as two exact ``p/q`` strings (``q`` omitted when 1)."""
        return str(self.re), str(self.im)

    @classmethod
    def from_part_strings(cls, re: str, im: str) -> "QC":
        """Parse exact ``p/q`` strings; plain decimals are read exactly too."""
        return cls(Fraction(re), Fraction(im))


QC_ZERO = QC(0)
QC_ONE = QC(1)
QC_I = QC(0, 1)
