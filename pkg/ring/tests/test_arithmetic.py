"""
Tests pour l'arithmétique de l'anneau et l'encodage en virgule fixe.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ring.arithmetic import (
    FixedPoint,
    RingConfig,
    RingValue,
    add,
    arith_shift_right,
    decode_array,
    decode_fixed,
    encode_array,
    encode_fixed,
    mul,
    reduce,
    shift_right,
    to_signed,
)
from ring.exceptions import EngineError, RingOverflowError

N8 = RingConfig(n=8, d=4)
N128 = RingConfig()


class TestRingConfig:
    """Tests pour RingConfig."""

    def test_defaults(self) -> None:
        """Test les valeurs par défaut (n=128, d=40)."""
        assert N128.n == 128
        assert N128.d == 40
        assert N128.element_bytes == 16
        assert N128.modulus == 1 << 128

    def test_element_bytes_rounds_up(self) -> None:
        """Test la taille sérialisée pour un n non multiple de 8."""
        assert RingConfig(n=12, d=4).element_bytes == 2

    @pytest.mark.parametrize(("n", "d"), [(0, 0), (129, 40), (8, 8), (8, 0), (8, -1)])
    def test_invalid_parameters(self, n: int, d: int) -> None:
        """Test le rejet des paramètres hors limites."""
        with pytest.raises(ValueError):
            RingConfig(n=n, d=d)


class TestScalarOperations:
    """Tests pour add, mul et arith_shift_right."""

    def test_add_wraps(self) -> None:
        """Test 200 + 100 = 44 pour n=8."""
        assert add(RingValue(200, N8), RingValue(100, N8)).value == 44

    def test_add_identity(self) -> None:
        """Test l'élément neutre de l'addition."""
        a = RingValue(123, N8)
        assert (a + RingValue(0, N8)) == a

    def test_mul_wraps(self) -> None:
        """Test 16 · 16 = 0 pour n=8."""
        assert mul(RingValue(16, N8), RingValue(16, N8)).value == 0

    def test_mul_identity(self) -> None:
        """Test l'élément neutre de la multiplication."""
        a = RingValue(77, N8)
        assert (a * RingValue(1, N8)) == a

    def test_random_128_bit_matches_python_ints(self) -> None:
        """Test add/mul à 128 bits contre les entiers Python."""
        rng = random.Random(7)
        for _ in range(200):
            x, y = rng.getrandbits(128), rng.getrandbits(128)
            a, b = RingValue(x, N128), RingValue(y, N128)
            assert add(a, b).value == (x + y) % (1 << 128)
            assert mul(a, b).value == (x * y) % (1 << 128)

    def test_group_laws_exhaustive_n8(self) -> None:
        """Test associativité, neutre et inverse sur tout Z_256."""
        values = [RingValue(v, N8) for v in range(256)]
        zero = RingValue(0, N8)
        for a in values:
            assert a + zero == a
            assert (a + (-a)) == zero
        rng = random.Random(3)
        for _ in range(2000):
            a, b, c = (values[rng.randrange(256)] for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a - b == a + (-b)

    def test_shift_negative(self) -> None:
        """Test -4 >> 2 = -1 pour n=8."""
        assert arith_shift_right(RingValue(252, N8), 2).value == 255

    def test_shift_zero_is_identity(self) -> None:
        """Test un décalage nul."""
        a = RingValue(201, N8)
        assert (a >> 0) == a

    def test_shift_exhaustive_n8(self) -> None:
        """Test le décalage contre l'oracle signé sur les 256 valeurs."""
        for d in range(1, 8):
            for v in range(256):
                signed = v - 256 if v >= 128 else v
                expected = (signed >> d) % 256
                assert arith_shift_right(RingValue(v, N8), d).value == expected

    def test_shift_out_of_range(self) -> None:
        """Test le rejet d'un décalage ≥ n."""
        with pytest.raises(ValueError):
            arith_shift_right(RingValue(1, N8), 8)

    def test_value_must_be_reduced(self) -> None:
        """Test qu'une valeur non réduite est refusée."""
        with pytest.raises(ValueError):
            RingValue(256, N8)
        assert RingValue.of(-1, N8).value == 255

    def test_mismatched_configs(self) -> None:
        """Test qu'on ne mélange pas deux anneaux."""
        with pytest.raises(ValueError):
            add(RingValue(1, N8), RingValue(1, RingConfig(n=16, d=4)))


class TestFixedPoint:
    """Tests pour encode_fixed et decode_fixed."""

    def test_encode_positive(self) -> None:
        """Test 1.5 avec d=4 donne 24."""
        assert encode_fixed(1.5, N8).raw.value == 24

    def test_encode_negative(self) -> None:
        """Test -0.25 avec d=4 donne 252."""
        assert encode_fixed(-0.25, N8).raw.value == 252

    def test_encode_exact_rational(self) -> None:
        """Test l'encodage de 0.3 à d=40 par arithmétique rationnelle."""
        expected = math.floor(Fraction(0.3) * (1 << 40))
        assert encode_fixed(0.3, N128).raw.value == expected

    def test_encode_floors_toward_minus_infinity(self) -> None:
        """Test l'arrondi vers -inf."""
        assert encode_fixed(-0.01, N8).raw.signed == -1
        assert encode_fixed(0.01, N8).raw.signed == 0

    def test_decode(self) -> None:
        """Test les décodages élémentaires."""
        assert decode_fixed(FixedPoint(RingValue(24, N8))) == 1.5
        assert float(FixedPoint(RingValue(252, N8))) == -0.25

    def test_overflow(self) -> None:
        """Test le rejet de |v| ≥ 2^(n-1-d)."""
        with pytest.raises(RingOverflowError):
            encode_fixed(8.0, N8)
        with pytest.raises(OverflowError):
            encode_fixed(-8.0, N8)
        assert issubclass(RingOverflowError, EngineError)

    def test_non_finite_values(self) -> None:
        """Test le rejet des valeurs non finies."""
        with pytest.raises(RingOverflowError):
            encode_fixed(float("nan"), N128)
        with pytest.raises(RingOverflowError):
            encode_fixed(float("inf"), N128)

    def test_round_trip_error(self) -> None:
        """Test que l'erreur aller-retour reste sous 2^-d."""
        rng = np.random.default_rng(11)
        for v in rng.uniform(-1e6, 1e6, size=2000):
            back = decode_fixed(encode_fixed(float(v), N128))
            assert 0 <= float(v) - back < 2.0**-40

    def test_shift_encode_law(self) -> None:
        """Test que shift(encode(v·2^d), d) décode à 2^-d près de v."""
        cfg = RingConfig(n=64, d=12)
        for v in [0.0, 1.0, -1.0, 3.75, -2.125, 100.33]:
            raw = encode_fixed(v * 2**12, cfg).raw
            shifted = FixedPoint(arith_shift_right(raw, 12))
            assert abs(decode_fixed(shifted) - v) < 2.0**-12


class TestVectorised:
    """Tests pour les versions vectorisées."""

    def test_reduce_and_signed(self) -> None:
        """Test reduce et to_signed sur un tableau."""
        arr = reduce(np.array([-1, 256, 130], dtype=object), N8)
        assert list(arr) == [255, 0, 130]
        assert list(to_signed(arr, N8)) == [-1, 0, -126]

    def test_shift_right_matches_scalar(self) -> None:
        """Test l'accord entre décalage vectorisé et scalaire."""
        arr = np.arange(256, dtype=object)
        shifted = shift_right(arr, 3, N8)
        for v in range(256):
            assert shifted[v] == arith_shift_right(RingValue(v, N8), 3).value

    def test_encode_array_matches_scalar(self) -> None:
        """Test l'accord entre encodage vectorisé et scalaire."""
        values = [0.3, -1.7, 12345.678, -0.0001, 0.0]
        raw = encode_array(values, N128)
        for v, r in zip(values, raw, strict=True):
            assert r == encode_fixed(v, N128).raw.value
        np.testing.assert_allclose(decode_array(raw, N128), values, atol=2.0**-40)

    def test_encode_array_rejects_out_of_range(self) -> None:
        """Test le rejet d'un tableau hors plage."""
        with pytest.raises(RingOverflowError):
            encode_array([1.0, 9.0], N8)
        with pytest.raises(RingOverflowError):
            encode_array([np.nan], N8)

    def test_large_values_stay_exact(self) -> None:
        """Test que les éléments 128 bits restent des entiers Python."""
        raw = encode_array([[-3.5, 2.0]], N128)
        assert raw.dtype == object
        assert raw.shape == (1, 2)
        assert raw[0, 0] == (1 << 128) - int(3.5 * (1 << 40))
