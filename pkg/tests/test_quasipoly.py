import json
import math
from fractions import Fraction

import numpy as np
import pytest

from fracstab import (
    ConfigError,
    FracOrder,
    FracSystem,
    Known,
    QuasiPolynomial,
    Unknown,
    parse_system,
    serialize_system,
    substitute,
)
from fracstab.quasipoly import Q_MAX, bind


class TestFracOrder:
    def test_decimal_strings_are_exact(self):
        assert FracOrder.of("0.5") == FracOrder(1, 2)
        assert FracOrder.of("1.31") == FracOrder(131, 100)
        assert FracOrder.of("0.97") == FracOrder(97, 100)
        assert FracOrder.of("2") == FracOrder(2, 1)

    def test_floats_convert_through_repr(self):
        assert FracOrder.of(0.97) == FracOrder(97, 100)
        assert FracOrder.of(1.31) == FracOrder(131, 100)

    def test_reduction(self):
        o = FracOrder(50, 100)
        assert (o.num, o.den) == (1, 2)

    def test_ordering_by_value(self):
        assert FracOrder(1, 2) < FracOrder(97, 100) < FracOrder(1) < FracOrder(131, 100)

    def test_den_cap(self):
        with pytest.raises(ValueError, match="Q_MAX"):
            FracOrder(1, Q_MAX + 1)

    def test_value_cap(self):
        with pytest.raises(ValueError):
            FracOrder(100, 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            FracOrder(-1, 2)
        with pytest.raises(ValueError):
            FracOrder.of("-0.5")

    def test_decimal_str_round_trips(self):
        for num, den in [(1, 2), (131, 100), (3, 8), (7, 1), (0, 1), (1, 3)]:
            o = FracOrder(num, den)
            assert FracOrder.of(o.decimal_str()) == o

    def test_non_terminating_decimal_uses_slash(self):
        assert FracOrder(1, 3).decimal_str() == "1/3"


class TestQuasiPolynomial:
    def test_orders_sorted_and_canonical(self):
        terms = [(Known(1.0), "1"), (Known(2.0), "0"), (Known(3.0), "0.5")]
        a = QuasiPolynomial(tuple(terms))
        b = QuasiPolynomial(tuple(reversed(terms)))
        assert a == b
        assert [float(o) for o in a.orders()] == [0.0, 0.5, 1.0]

    def test_canonical_for_any_construction_order(self):
        rng = np.random.default_rng(42)
        terms = [
            (Known(1.5), "0"),
            (Unknown("a"), "0.25"),
            (Known(-2.0), "0.5"),
            (Unknown("b", 3.0), "1"),
            (Known(4.0), "1.75"),
        ]
        reference = QuasiPolynomial(tuple(terms))
        for _ in range(20):
            perm = rng.permutation(len(terms))
            assert QuasiPolynomial(tuple(terms[i] for i in perm)) == reference

    def test_duplicate_known_orders_merge(self):
        qp = QuasiPolynomial(((Known(1.0), "0.5"), (Known(2.5), "0.5"), (Known(1.0), 0)))
        assert qp.known_values() == (1.0, 3.5)

    def test_zero_known_terms_dropped(self):
        qp = QuasiPolynomial(((Known(0.0), "1"), (Known(1.0), "0")))
        assert len(qp.terms) == 1
        assert float(qp.degree) == 0.0

    def test_known_plus_unknown_same_order_rejected(self):
        with pytest.raises(ValueError, match="ambiguous"):
            QuasiPolynomial(((Known(1.0), "0.5"), (Unknown("a"), "0.5")))

    def test_duplicate_parameter_name_rejected(self):
        with pytest.raises(ValueError, match="more than one term"):
            QuasiPolynomial(((Unknown("a"), "0.5"), (Unknown("a"), "1")))

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one term"):
            QuasiPolynomial(())
        with pytest.raises(ValueError, match="at least one term"):
            QuasiPolynomial(((Known(0.0), "1"),))

    def test_zero_multiplier_rejected(self):
        with pytest.raises(ValueError):
            Unknown("a", 0.0)

    def test_readable_str(self):
        qp = QuasiPolynomial(
            ((Unknown("c"), "0"), (Unknown("b", -2.0), "0.5"), (Known(1.5), "1"))
        )
        assert str(qp) == "1.5*s + -2.0*b*s^0.5 + c"


class TestSubstitute:
    def test_stable_point_binding(self, basset_qp):
        bound = substitute(basset_qp, {"a": -3, "b": -2, "c": -4})
        assert bound.is_known
        assert bound.known_values() == (-4.0, -2.0, -3.0)
        assert [float(o) for o in bound.orders()] == [0.0, 0.5, 1.0]

    def test_zero_binding_drops_term(self, basset_qp):
        bound = substitute(basset_qp, {"a": 0, "b": 1, "c": 1})
        assert [float(o) for o in bound.orders()] == [0.0, 0.5]
        assert bound.known_values() == (1.0, 1.0)

    def test_furnace_nominal(self, furnace_qp):
        bound = substitute(furnace_qp, {"a": 14994, "b": 6009.5, "c": 1.69})
        assert bound.known_values() == (1.69, 6009.5, 14994.0)
        assert bound.orders()[-1] == FracOrder(131, 100)

    def test_missing_binding_names_parameter(self, basset_qp):
        with pytest.raises(ValueError, match="'b'"):
            substitute(basset_qp, {"a": 1, "c": 1})

    def test_nonfinite_binding_rejected(self, basset_qp):
        with pytest.raises(ValueError, match="finite"):
            substitute(basset_qp, {"a": 1, "b": math.inf, "c": 1})

    def test_linearity_in_each_binding(self, basset_qp):
        rng = np.random.default_rng(7)
        for _ in range(50):
            vals = {n: float(v) for n, v in zip("abc", rng.uniform(-5, 5, 3))}
            lam = float(rng.uniform(0.1, 4.0))
            scaled = dict(vals)
            scaled["b"] = lam * vals["b"]
            base = substitute(basset_qp, vals)
            result = substitute(basset_qp, scaled)
            for (c1, o1), (c2, o2) in zip(base.terms, result.terms):
                assert o1 == o2
                expect = c1.value * lam if float(o1) == 0.5 else c1.value
                assert c2.value == pytest.approx(expect, rel=1e-15)

    def test_partial_bind_keeps_free_parameters(self, basset_qp):
        part = bind(basset_qp, {"b": -2.0})
        assert part.unknowns == ("c", "a")
        assert isinstance(part.terms[1][0], Known)


class TestSystemFiles:
    def test_parse_furnace_shape(self, furnace_cfg):
        with open(furnace_cfg) as fh:
            system = parse_system(fh.read())
        assert system.denominator.unknowns == ("c", "b", "a")
        assert system.denominator.orders()[-1] == FracOrder(131, 100)
        assert system.gain == 1.0
        assert float(system.numerator.degree) == 0.0

    def test_constant_system_parses(self):
        system = parse_system('{"denominator": [{"coeff": 1, "order": "0"}]}')
        assert float(system.denominator.degree) == 0.0

    def test_decimal_order_exact(self):
        system = parse_system('{"denominator": [{"coeff": 1, "order": "0.5"}]}')
        assert system.denominator.orders()[0] == FracOrder(1, 2)

    def test_syntax_error_reports_location(self):
        with pytest.raises(ConfigError, match=r"line \d+ column \d+"):
            parse_system('{"denominator": [}')

    def test_invariant_violation_names_field(self):
        doc = {"denominator": [{"coeff": 1, "order": "0.0001"}]}
        with pytest.raises(ConfigError, match="Q_MAX"):
            parse_system(json.dumps(doc))

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="denominatr"):
            parse_system('{"denominatr": []}')

    def test_improper_system_rejected(self):
        doc = {
            "denominator": [{"coeff": 1, "order": "0.5"}],
            "numerator": [{"coeff": 1, "order": "1"}],
        }
        with pytest.raises(ConfigError, match="degree"):
            parse_system(json.dumps(doc))

    def test_round_trip_identity(self, basset_qp, furnace_nominal):
        systems = [
            FracSystem(basset_qp),
            FracSystem(furnace_nominal, gain=2.5),
            FracSystem(
                QuasiPolynomial(((Known(1.0), "0"), (Known(0.125), "1.5"))),
                QuasiPolynomial(((Known(3.0), "0"), (Known(-1.0), "0.75"))),
                gain=-0.5,
            ),
        ]
        for system in systems:
            text = serialize_system(system)
            again = parse_system(text)
            assert again == system
            # canonical serialization is byte-stable
            assert serialize_system(again) == text

    def test_random_round_trip(self):
        rng = np.random.default_rng(11)
        for trial in range(30):
            n_terms = int(rng.integers(1, 6))
            terms = []
            used = set()
            for t in range(n_terms):
                den = int(rng.choice([1, 2, 4, 5, 10, 100]))
                num = int(rng.integers(0, 99 * den))
                if Fraction(num, den) in used:
                    continue
                used.add(Fraction(num, den))
                if rng.random() < 0.3:
                    coeff = Unknown(f"p{t}", float(rng.uniform(0.5, 2)))
                else:
                    coeff = Known(float(rng.standard_normal()))
                terms.append((coeff, FracOrder(num, den)))
            if not terms:
                continue
            try:
                system = FracSystem(QuasiPolynomial(tuple(terms)))
            except ValueError:
                continue
            assert parse_system(serialize_system(system)) == system
