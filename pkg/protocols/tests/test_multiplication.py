"""
Tests pour la multiplication en virgule fixe.
"""

from collections.abc import Callable

import numpy as np
import pytest

from netsim.stats import stats_diff
from protocols.multiplication import mul_fixed, mul_public, mul_sum
from protocols.transcripts import latest, truncation_wrapped
from ring.arithmetic import encode_array, reduce, to_signed
from sharing.algebra import reveal_raw
from sharing.engine import Engine
from sharing.oracle import open_values
from sharing.parties import SERVERS, Server
from sharing.shares import ShareKind
from tensor.share_tensor import ShareTensor


def _scaled_error(
    engine: Engine, x: np.ndarray, y: np.ndarray, z: ShareTensor
) -> np.ndarray:
    """|révélé - produit exact des valeurs encodées|, en unités de 2^-2d.

    Calcul en entiers exacts : 2^-d vaut ``scale`` dans cette unité.
    """
    cfg = engine.config
    ex = to_signed(encode_array(x, cfg), cfg)
    ey = to_signed(encode_array(y, cfg), cfg)
    revealed = to_signed(reveal_raw(z), cfg)
    return np.abs(revealed * cfg.scale - ex * ey)


def _assert_truncation_bound(engine: Engine, error: np.ndarray) -> None:
    scale = engine.config.scale
    assert bool(np.all(np.asarray(error <= 2 * scale, dtype=bool)))
    assert float(np.mean(np.asarray(error <= scale, dtype=bool))) >= 0.99


class TestMulFixed:
    """Tests pour mul_fixed."""

    def test_simple_product(self, engine: Engine) -> None:
        """Test share(2.0)·share(3.0) ≈ 6.0."""
        result = engine.ss(2.0) * engine.ss(3.0)
        assert abs(float(engine.reveal(result)) - 6.0) <= 2.0 ** (1 - 40)

    def test_zero_product(self, engine: Engine) -> None:
        """Test qu'un produit nul révèle 0 à un LSB près."""
        result = mul_fixed(engine.ss(-12.5), engine.ss(0.0))
        assert abs(float(engine.reveal(result))) <= 2.0**-40

    def test_negative_operands(self, engine: Engine) -> None:
        """Test le signe du produit."""
        x, y = engine.ss([-1.5, 2.25, -3.0]), engine.ss([2.0, -4.0, -0.5])
        values = engine.reveal(x * y)
        np.testing.assert_allclose(values, [-3.0, -9.0, 1.5], atol=2.0 ** (1 - 40))

    def test_costs_one_round_two_elements(self, engine: Engine) -> None:
        """Test que chaque serveur envoie 2 éléments en une ronde."""
        x, y = engine.ss([1.0, 2.0, 3.0]), engine.ss([4.0, 5.0, 6.0])
        before = engine.stats_snapshot()
        mul_fixed(x, y)
        diff = stats_diff(before, engine.stats_snapshot())
        assert diff.total_rounds == 1
        for pid in SERVERS:
            party = diff.party(pid)
            assert party.messages == 2
            assert party.bytes == 2 * 3 * engine.config.element_bytes
            assert party.rounds == 1

    def test_broadcasting(self, engine: Engine) -> None:
        """Test la diffusion d'un scalaire partagé sur un vecteur."""
        result = engine.ss([[1.0, 2.0], [3.0, 4.0]]) * engine.ss(0.5)
        assert result.shape == (2, 2)
        np.testing.assert_allclose(
            engine.reveal(result), [[0.5, 1.0], [1.5, 2.0]], atol=2.0 ** (1 - 40)
        )

    def test_rejects_bit_shares(self, engine: Engine) -> None:
        """Test qu'un partage de bits est refusé."""
        bits = engine.ss([1, 0], kind=ShareKind.BIT)
        with pytest.raises(TypeError):
            mul_fixed(bits, engine.ss([1.0, 2.0]))

    def test_random_products_within_bound(
        self, engine: Engine, rng: np.random.Generator
    ) -> None:
        """Test 2000 produits aléatoires dans la plage sûre."""
        x = rng.uniform(-1000.0, 1000.0, 2000)
        y = rng.uniform(-1000.0, 1000.0, 2000)
        error = _scaled_error(engine, x, y, engine.ss(x) * engine.ss(y))
        _assert_truncation_bound(engine, error)

    @pytest.mark.slow
    def test_million_products_within_bound(
        self, engine: Engine, rng: np.random.Generator
    ) -> None:
        """Test la borne d'erreur de troncature sur 10^6 produits."""
        x = rng.uniform(-1e4, 1e4, 1_000_000)
        y = rng.uniform(-1e4, 1e4, 1_000_000)
        error = _scaled_error(engine, x, y, engine.ss(x) * engine.ss(y))
        _assert_truncation_bound(engine, error)

    def test_distributivity(self, engine: Engine) -> None:
        """Test a(b + c) = ab + ac à 3·2^-d près."""
        a, b, c = engine.ss(1.75), engine.ss(-2.5), engine.ss(3.125)
        left = float(engine.reveal(a * (b + c)))
        right = float(engine.reveal(a * b)) + float(engine.reveal(a * c))
        assert abs(left - right) <= 3 * 2.0**-40

    def test_exhaustive_small_ring(
        self, small_engine: Engine, share_raw: Callable[..., ShareTensor]
    ) -> None:
        """Test exhaustif n=16, d=4 : ⌊XY/2^d⌋ ou +1 hors débordement."""
        cfg = small_engine.config
        grid = np.arange(-64, 64)
        xs, ys = np.meshgrid(grid, grid, indexing="ij")
        x = share_raw(small_engine, xs, seed=1)
        y = share_raw(small_engine, ys, seed=2)
        z = mul_fixed(x, y)
        wrapped = truncation_wrapped(small_engine, latest(small_engine, "mul"))
        revealed = to_signed(reveal_raw(z), cfg).astype(np.int64)
        floor = (xs * ys) >> cfg.d
        ok = (revealed == floor) | (revealed == floor + 1)
        assert bool(np.all(ok | wrapped))
        assert float(np.mean(wrapped)) < 0.1


class TestMulPublic:
    """Tests pour mul_public."""

    def test_fractional_constant(self, engine: Engine) -> None:
        """Test share(1.5)·2.5."""
        result = mul_public(engine.ss(1.5), 2.5)
        assert abs(float(engine.reveal(result)) - 3.75) <= 2.0 ** (1 - 40)

    def test_integer_constant_is_exact(self, engine: Engine) -> None:
        """Test qu'une constante entière ne tronque pas."""
        x = engine.ss(1.5)
        assert float(open_values(mul_public(x, 2.0))) == 3.0
        assert float(open_values(x * -3)) == -4.5

    def test_identity(self, engine: Engine) -> None:
        """Test ·1.0 = identité."""
        assert float(engine.reveal(mul_public(engine.ss(0.3), 1.0))) == pytest.approx(
            0.3, abs=2.0**-40
        )

    def test_no_communication(self, engine: Engine) -> None:
        """Test que le produit public est gratuit."""
        x = engine.ss([1.0, 2.0])
        before = engine.stats_snapshot()
        mul_public(x, [0.5, 0.25])
        diff = stats_diff(before, engine.stats_snapshot())
        assert diff.total_rounds == 0
        assert all(diff.party(pid).bytes == 0 for pid in SERVERS)

    def test_division_by_public(self, engine: Engine) -> None:
        """Test x / 4.0."""
        assert float(engine.reveal(engine.ss(10.0) / 4.0)) == pytest.approx(
            2.5, abs=2.0 ** (1 - 40)
        )


class TestMulSum:
    """Tests pour mul_sum."""

    def test_sum_of_products(self, engine: Engine) -> None:
        """Test Σ xᵢyᵢ en une seule ronde."""
        pairs = [(engine.ss(1.5), engine.ss(2.0)), (engine.ss(-0.5), engine.ss(4.0))]
        before = engine.stats_snapshot()
        result = mul_sum(pairs)
        diff = stats_diff(before, engine.stats_snapshot())
        assert diff.total_rounds == 1
        assert abs(float(engine.reveal(result)) - 1.0) <= 2.0 ** (1 - 40)

    def test_empty_pairs(self, engine: Engine) -> None:
        """Test qu'une liste vide est refusée."""
        with pytest.raises(ValueError):
            mul_sum([])


class TestTranscripts:
    """Tests pour la consignation des valeurs intermédiaires."""

    def test_products_recorded_per_server(
        self, small_engine: Engine, share_raw: Callable[..., ShareTensor]
    ) -> None:
        """Test que chaque serveur consigne t, t' et les sommes avant décalage."""
        mul_fixed(share_raw(small_engine, [3]), share_raw(small_engine, [5]))
        transcript = latest(small_engine, "mul")
        for pid in SERVERS:
            assert set(transcript.names(pid)) == {"t", "t'", "z", "z'"}
        cfg = small_engine.config
        z = reduce(transcript.get(Server.S1, "z") + transcript.get(Server.S2, "z"), cfg)
        assert int(z[0]) == 15

    def test_disabled_by_default(self, engine: Engine) -> None:
        """Test qu'aucun transcript n'est tenu sans l'option."""
        mul_fixed(engine.ss(1.0), engine.ss(1.0))
        with pytest.raises(RuntimeError):
            latest(engine, "mul")
