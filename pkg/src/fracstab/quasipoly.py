"""Exact fractional orders, quasi-polynomials and system definitions.

A quasi-polynomial is a sum of terms ``coeff * s**order`` where the orders
are non-negative rationals. Orders are kept as exact fractions throughout:
the commensurate transform needs an exact common base, and float orders
would make the reduced degree ill-defined. Coefficients are plain floats,
either known values or named free parameters entering linearly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Union

__all__ = [
    "Q_MAX",
    "ORDER_MAX",
    "ConfigError",
    "FracOrder",
    "Known",
    "Unknown",
    "Coefficient",
    "QuasiPolynomial",
    "FracSystem",
    "substitute",
    "bind",
    "parse_system",
    "serialize_system",
]

# Largest allowed order denominator. Caps the commensurate degree and
# therefore root-finder cost; every practical model uses den <= 100.
Q_MAX = 1000

# Orders must stay below this value (exponents of s).
ORDER_MAX = 100


class ConfigError(ValueError):
    """Raised for malformed or invalid system definition documents."""


@total_ordering
@dataclass(frozen=True)
class FracOrder:
    """Exact rational exponent num/den with num >= 0 and den > 0.

    Reduced to lowest terms on construction. ``den`` must not exceed
    ``Q_MAX`` and the value must be below ``ORDER_MAX``.
    """

    num: int
    den: int = 1

    def __post_init__(self):
        if not isinstance(self.num, int) or not isinstance(self.den, int):
            raise TypeError("FracOrder fields must be ints; use FracOrder.of() to convert")
        if self.den <= 0:
            raise ValueError("order denominator must be positive")
        if self.num < 0:
            raise ValueError("orders must be non-negative")
        g = math.gcd(self.num, self.den)
        object.__setattr__(self, "num", self.num // g)
        object.__setattr__(self, "den", self.den // g)
        if self.den > Q_MAX:
            raise ValueError(
                f"order denominator {self.den} exceeds Q_MAX={Q_MAX}"
            )
        if self.num >= ORDER_MAX * self.den:
            raise ValueError(f"order {self.num}/{self.den} must be below {ORDER_MAX}")

    @classmethod
    def of(cls, value) -> "FracOrder":
        """Convert int, decimal string, float or Fraction to a FracOrder.

        Strings and floats are converted exactly through their decimal
        form ("0.97" -> 97/100); floats go through their shortest
        round-trip repr, so only terminating decimals stay small.
        """
        if isinstance(value, FracOrder):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not an order")
        if isinstance(value, int):
            return cls(value, 1)
        if isinstance(value, Fraction):
            return cls(value.numerator, value.denominator)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"order must be finite, got {value!r}")
            value = repr(value)
        if isinstance(value, str):
            try:
                frac = Fraction(value)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"cannot parse order {value!r}") from exc
            if frac < 0:
                raise ValueError("orders must be non-negative")
            return cls(frac.numerator, frac.denominator)
        raise TypeError(f"cannot convert {type(value).__name__} to FracOrder")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def __float__(self) -> float:
        return self.num / self.den

    def __eq__(self, other):
        if isinstance(other, FracOrder):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, FracOrder):
            return self.num * other.den < other.num * self.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self) -> str:
        return self.decimal_str()

    def decimal_str(self) -> str:
        """Shortest exact decimal string, or "num/den" if non-terminating."""
        if self.den == 1:
            return str(self.num)
        den = self.den
        two = five = 0
        while den % 2 == 0:
            den //= 2
            two += 1
        while den % 5 == 0:
            den //= 5
            five += 1
        if den != 1:
            return f"{self.num}/{self.den}"
        k = max(two, five)
        digits = self.num * 10**k // self.den
        text = str(digits).rjust(k + 1, "0")
        return f"{text[:-k]}.{text[-k:]}"


@dataclass(frozen=True)
class Known:
    """A fixed real coefficient."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"coefficient must be finite, got {self.value!r}")
        object.__setattr__(self, "value", v)

    def __str__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Unknown:
    """A free parameter entering linearly: contributes mult * value."""

    name: str
    mult: float = 1.0

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.isidentifier():
            raise ValueError(f"parameter name must be an identifier, got {self.name!r}")
        m = float(self.mult)
        if not math.isfinite(m) or m == 0.0:
            raise ValueError(f"parameter multiplier must be finite and nonzero, got {self.mult!r}")
        object.__setattr__(self, "mult", m)

    def __str__(self) -> str:
        return self.name if self.mult == 1.0 else f"{self.mult!r}*{self.name}"


Coefficient = Union[Known, Unknown]


def _as_coefficient(obj) -> Coefficient:
    if isinstance(obj, (Known, Unknown)):
        return obj
    if isinstance(obj, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(obj, (int, float)):
        return Known(float(obj))
    raise TypeError(f"cannot interpret {obj!r} as a coefficient")


@dataclass(frozen=True)
class QuasiPolynomial:
    """Ordered sum of (coefficient, order) terms with strictly increasing orders.

    Construction canonicalizes its input: terms are sorted by order,
    duplicate known orders are merged by addition, exact-zero known terms
    are dropped, and parameter names must be unique. A known and an
    unknown coefficient at the same order is rejected as an ambiguous
    parameterization.
    """

    terms: tuple = field(default=())

    def __post_init__(self):
        by_order: dict[Fraction, Coefficient] = {}
        for item in self.terms:
            coeff, order = item
            coeff = _as_coefficient(coeff)
            order = FracOrder.of(order)
            key = order.fraction
            if key in by_order:
                prev = by_order[key]
                if isinstance(prev, Known) and isinstance(coeff, Known):
                    coeff = Known(prev.value + coeff.value)
                else:
                    raise ValueError(
                        f"duplicate order {order} mixing known and parameter "
                        "coefficients is ambiguous"
                    )
            by_order[key] = coeff
        canonical = []
        names = set()
        for key in sorted(by_order):
            coeff = by_order[key]
            if isinstance(coeff, Known) and coeff.value == 0.0:
                continue
            if isinstance(coeff, Unknown):
                if coeff.name in names:
                    raise ValueError(f"parameter {coeff.name!r} appears in more than one term")
                names.add(coeff.name)
            canonical.append((coeff, FracOrder(key.numerator, key.denominator)))
        if not canonical:
            raise ValueError("quasi-polynomial must have at least one term")
        object.__setattr__(self, "terms", tuple(canonical))

    @property
    def degree(self) -> FracOrder:
        return self.terms[-1][1]

    @property
    def leading(self) -> Coefficient:
        return self.terms[-1][0]

    @property
    def constant(self) -> Coefficient | None:
        """The order-0 coefficient, or None if there is no order-0 term."""
        coeff, order = self.terms[0]
        return coeff if order.is_zero else None

    @property
    def unknowns(self) -> tuple[str, ...]:
        return tuple(c.name for c, _ in self.terms if isinstance(c, Unknown))

    @property
    def is_known(self) -> bool:
        return all(isinstance(c, Known) for c, _ in self.terms)

    def known_values(self) -> tuple[float, ...]:
        if not self.is_known:
            raise ValueError("quasi-polynomial still has unbound parameters")
        return tuple(c.value for c, _ in self.terms)

    def eval_at(self, s: complex) -> complex:
        """Evaluate a fully known quasi-polynomial at complex s.

        Fractional powers use the principal branch.
        """
        total = 0.0 + 0.0j
        for value, order in zip(self.known_values(), self.orders()):
            total += value * complex(s) ** float(order)
        return total

    def orders(self) -> tuple[FracOrder, ...]:
        return tuple(o for _, o in self.terms)

    def scaled(self, factor: float) -> "QuasiPolynomial":
        """Multiply every coefficient by a nonzero constant."""
        f = float(factor)
        if not math.isfinite(f) or f == 0.0:
            raise ValueError("scale factor must be finite and nonzero")
        out = []
        for coeff, order in self.terms:
            if isinstance(coeff, Known):
                out.append((Known(coeff.value * f), order))
            else:
                out.append((Unknown(coeff.name, coeff.mult * f), order))
        return QuasiPolynomial(tuple(out))

    def __str__(self) -> str:
        parts = []
        for coeff, order in reversed(self.terms):
            if order.is_zero:
                parts.append(str(coeff))
            elif order == FracOrder(1):
                parts.append(f"{coeff}*s")
            else:
                parts.append(f"{coeff}*s^{order}")
        return " + ".join(parts)


def substitute(qp: QuasiPolynomial, bindings: Mapping[str, float]) -> QuasiPolynomial:
    """Resolve every parameter of qp to a known value.

    Each Unknown(name, mult) term becomes Known(mult * bindings[name]).
    Raises if any parameter is missing or a bound value is not finite.
    Extra bindings are ignored.
    """
    missing = [n for n in qp.unknowns if n not in bindings]
    if missing:
        raise ValueError(f"missing binding for parameter {missing[0]!r}")
    for name in qp.unknowns:
        v = float(bindings[name])
        if not math.isfinite(v):
            raise ValueError(f"binding for {name!r} must be finite, got {bindings[name]!r}")
    out = []
    for coeff, order in qp.terms:
        if isinstance(coeff, Unknown):
            coeff = Known(coeff.mult * float(bindings[coeff.name]))
        out.append((coeff, order))
    return QuasiPolynomial(tuple(out))


def bind(qp: QuasiPolynomial, bindings: Mapping[str, float]) -> QuasiPolynomial:
    """Resolve the parameters present in bindings, keep the rest free."""
    out = []
    for coeff, order in qp.terms:
        if isinstance(coeff, Unknown) and coeff.name in bindings:
            v = float(bindings[coeff.name])
            if not math.isfinite(v):
                raise ValueError(f"binding for {coeff.name!r} must be finite")
            coeff = Known(coeff.mult * v)
        out.append((coeff, order))
    return QuasiPolynomial(tuple(out))


_ONE = None  # constructed lazily; QuasiPolynomial() in a default would run at import


def _constant_one() -> QuasiPolynomial:
    global _ONE
    if _ONE is None:
        _ONE = QuasiPolynomial(((Known(1.0), FracOrder(0)),))
    return _ONE


@dataclass(frozen=True)
class FracSystem:
    """Transfer-function data: gain * numerator(s) / denominator(s)."""

    denominator: QuasiPolynomial
    numerator: QuasiPolynomial = None
    gain: float = 1.0

    def __post_init__(self):
        if self.numerator is None:
            object.__setattr__(self, "numerator", _constant_one())
        g = float(self.gain)
        if not math.isfinite(g):
            raise ValueError("gain must be finite")
        object.__setattr__(self, "gain", g)
        num_deg = self.numerator.degree
        den_deg = self.denominator.degree
        # Proper system: numerator degree strictly below the denominator,
        # except for the degenerate constant/constant case.
        if not (num_deg < den_deg or (num_deg.is_zero and den_deg.is_zero)):
            raise ValueError(
                f"numerator degree {num_deg} must be below denominator degree {den_deg}"
            )

    @property
    def unknowns(self) -> tuple[str, ...]:
        seen = []
        for name in self.denominator.unknowns + self.numerator.unknowns:
            if name not in seen:
                seen.append(name)
        return tuple(seen)


# ---------------------------------------------------------------------------
# System definition files
# ---------------------------------------------------------------------------
#
# A system is one JSON document:
#
#   {
#     "denominator": [{"coeff": <number or {"param": str, "mult": number}>,
#                      "order": <decimal string>}, ...],
#     "numerator":   [...],        # optional, defaults to constant 1
#     "gain":        1.0           # optional
#   }
#
# The canonical serialization is byte-stable: terms sorted by ascending
# order, orders as exact decimal strings, floats in shortest round-trip
# form.


def _term_from_doc(doc, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: each term must be an object, got {type(doc).__name__}")
    extra = set(doc) - {"coeff", "order"}
    if extra:
        raise ConfigError(f"{where}: unexpected key {sorted(extra)[0]!r}")
    if "coeff" not in doc:
        raise ConfigError(f"{where}: missing 'coeff'")
    if "order" not in doc:
        raise ConfigError(f"{where}: missing 'order'")
    raw = doc["coeff"]
    if isinstance(raw, dict):
        bad = set(raw) - {"param", "mult"}
        if bad:
            raise ConfigError(f"{where}.coeff: unexpected key {sorted(bad)[0]!r}")
        if "param" not in raw:
            raise ConfigError(f"{where}.coeff: missing 'param'")
        try:
            coeff = Unknown(raw["param"], float(raw.get("mult", 1.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.coeff: {exc}") from exc
    elif isinstance(raw, bool):
        raise ConfigError(f"{where}.coeff: must be a number or parameter object")
    elif isinstance(raw, (int, float)):
        try:
            coeff = Known(float(raw))
        except ValueError as exc:
            raise ConfigError(f"{where}.coeff: {exc}") from exc
    else:
        raise ConfigError(f"{where}.coeff: must be a number or parameter object")
    raw_order = doc["order"]
    if isinstance(raw_order, bool) or not isinstance(raw_order, (str, int, float)):
        raise ConfigError(f"{where}.order: must be a decimal string or number")
    try:
        order = FracOrder.of(raw_order)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.order: {exc}") from exc
    return coeff, order


def _poly_from_doc(doc, where: str) -> QuasiPolynomial:
    if not isinstance(doc, list) or not doc:
        raise ConfigError(f"{where}: must be a non-empty list of terms")
    terms = [_term_from_doc(t, f"{where}[{i}]") for i, t in enumerate(doc)]
    try:
        return QuasiPolynomial(tuple(terms))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_system(text: str) -> FracSystem:
    """Parse a system definition document into a validated FracSystem."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("document must be a JSON object")
    extra = set(doc) - {"denominator", "numerator", "gain"}
    if extra:
        raise ConfigError(f"unexpected key {sorted(extra)[0]!r}")
    if "denominator" not in doc:
        raise ConfigError("missing 'denominator'")
    den = _poly_from_doc(doc["denominator"], "denominator")
    num = None
    if "numerator" in doc:
        num = _poly_from_doc(doc["numerator"], "numerator")
    gain = 1.0
    if "gain" in doc:
        raw = doc["gain"]
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError("gain: must be a number")
        gain = float(raw)
    try:
        return FracSystem(den, num, gain)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _term_to_doc(coeff: Coefficient, order: FracOrder) -> dict:
    if isinstance(coeff, Known):
        cdoc = coeff.value
    else:
        cdoc = {"param": coeff.name, "mult": coeff.mult}
    return {"coeff": cdoc, "order": order.decimal_str()}


def serialize_system(system: FracSystem) -> str:
    """Canonical byte-stable serialization; parse_system round-trips it."""
    doc = {
        "denominator": [_term_to_doc(c, o) for c, o in system.denominator.terms],
        "numerator": [_term_to_doc(c, o) for c, o in system.numerator.terms],
        "gain": system.gain,
    }
    return json.dumps(doc, indent=2) + "\n"
