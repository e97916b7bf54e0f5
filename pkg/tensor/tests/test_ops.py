"""
Tests pour les opérations de tenseurs.
"""

import numpy as np
import pytest

from netsim.stats import NetStats, stats_diff
from ring.arithmetic import encode_array, to_signed
from sharing.engine import Engine
from sharing.oracle import open_raw
from sharing.parties import SERVERS
from tensor import ops
from tensor.exceptions import EmptyAxisError, ShapeError
from tensor.share_tensor import ShareTensor

LSB = 2.0**-40


def _silent(diff: NetStats) -> bool:
    return diff.total_rounds == 0 and all(
        diff.party(pid).messages == 0 for pid in SERVERS
    )


def _units_error(engine: Engine, z: ShareTensor, exact: np.ndarray) -> np.ndarray:
    """|révélé - exact| en unités de 2^-2d (``exact`` déjà à l'échelle 2^2d)."""
    cfg = engine.config
    return np.abs(to_signed(open_raw(z), cfg) * cfg.scale - exact)


class TestElementwise:
    """Tests pour elementwise et les opérateurs."""

    def test_product(self, engine: Engine) -> None:
        """Test [1, 2] × [3, 4]."""
        z = ops.elementwise("*", engine.ss([1.0, 2.0]), engine.ss([3.0, 4.0]))
        np.testing.assert_allclose(engine.reveal(z), [3.0, 8.0], atol=2 * LSB)

    def test_one_round_for_ten_thousand(self, engine: Engine) -> None:
        """Test qu'un produit de 10^4 éléments coûte une ronde."""
        gen = np.random.default_rng(1)
        x = engine.ss(gen.uniform(-9, 9, 10_000))
        y = engine.ss(gen.uniform(-9, 9, 10_000))
        before = engine.stats_snapshot()
        x * y
        assert stats_diff(before, engine.stats_snapshot()).total_rounds == 1

    def test_times_ones(self, engine: Engine) -> None:
        """Test a × ones(shape) ≈ a."""
        a = engine.ss([[0.5, -1.25], [3.0, 7.75]])
        revealed = engine.reveal(a * ops.ones(engine, (2, 2)))
        np.testing.assert_allclose(revealed, engine.reveal(a), atol=LSB)

    def test_dispatch(self, engine: Engine) -> None:
        """Test +, -, <, > et mux."""
        a, b = engine.ss([1.0, 5.0]), engine.ss([2.0, 2.0])
        total, difference = ops.elementwise("+", a, b), ops.elementwise("-", a, b)
        np.testing.assert_array_equal(engine.reveal(total), [3, 7])
        np.testing.assert_array_equal(engine.reveal(difference), [-1, 3])
        below = ops.elementwise("<", a, b)
        np.testing.assert_array_equal(engine.reveal(below), [1, 0])
        np.testing.assert_array_equal(engine.reveal(ops.elementwise(">", a, b)), [0, 1])
        chosen = ops.elementwise("mux", below, a, b)
        np.testing.assert_array_equal(engine.reveal(chosen), [1.0, 2.0])
        with pytest.raises(ValueError):
            ops.elementwise("%", a, b)

    def test_broadcast_operands(self, engine: Engine) -> None:
        """Test (2,4,3) + (2,1,3)."""
        a = engine.ss(np.ones((2, 4, 3)))
        b = engine.ss(np.arange(6.0).reshape(2, 1, 3))
        result = a + b
        assert result.shape == (2, 4, 3)
        np.testing.assert_array_equal(
            engine.reveal(result), np.ones((2, 4, 3)) + np.arange(6.0).reshape(2, 1, 3)
        )

    def test_incompatible_shapes(self, engine: Engine) -> None:
        """Test (3,) + (4,)."""
        with pytest.raises(ShapeError):
            engine.ss([1.0, 2.0, 3.0]) + engine.ss([1.0, 2.0, 3.0, 4.0])


class TestDot:
    """Tests pour dot et outer."""

    def test_small_vectors(self, engine: Engine) -> None:
        """Test [1, 2]·[3, 4] = 11."""
        result = ops.dot(engine.ss([1.0, 2.0]), engine.ss([3.0, 4.0]))
        assert float(engine.reveal(result)) == pytest.approx(11.0, abs=2 * LSB)

    @pytest.mark.parametrize("n", [2, 5, 8, 16])
    def test_communication_is_quadratic(self, engine: Engine, n: int) -> None:
        """Test 2n² éléments envoyés par serveur en une ronde."""
        a, b = engine.ss(np.ones((n, n))), engine.ss(np.ones((n, n)))
        before = engine.stats_snapshot()
        a @ b
        diff = stats_diff(before, engine.stats_snapshot())
        assert diff.total_rounds == 1
        for pid in SERVERS:
            assert diff.party(pid).bytes == 2 * n * n * engine.config.element_bytes

    def test_random_matrices(self, engine: Engine, rng: np.random.Generator) -> None:
        """Test des matrices 8×8 : une troncature par sortie."""
        cfg = engine.config
        a_values, b_values = rng.uniform(-10, 10, (8, 8)), rng.uniform(-10, 10, (8, 8))
        exact = np.matmul(
            to_signed(encode_array(a_values, cfg), cfg),
            to_signed(encode_array(b_values, cfg), cfg),
        )
        a, b = engine.ss(a_values), engine.ss(b_values)
        dot_error = _units_error(engine, a @ b, exact)
        naive = ops.sum_(a.reshape(8, 8, 1) * b.reshape(1, 8, 8), axis=1)
        naive_error = _units_error(engine, naive, exact)
        assert bool(np.all(dot_error <= 2 * cfg.scale))
        assert np.max(dot_error) <= np.max(naive_error)

    def test_sixteen_by_sixteen_against_naive(
        self, engine: Engine, rng: np.random.Generator
    ) -> None:
        """Test 16×16 : 2·256 éléments par serveur, 2·4096 en produit naïf."""
        cfg = engine.config
        element = cfg.element_bytes
        a_values = rng.uniform(-10, 10, (16, 16))
        b_values = rng.uniform(-10, 10, (16, 16))
        exact = np.matmul(
            to_signed(encode_array(a_values, cfg), cfg),
            to_signed(encode_array(b_values, cfg), cfg),
        )
        a, b = engine.ss(a_values), engine.ss(b_values)

        before = engine.stats_snapshot()
        product = a @ b
        dot_diff = stats_diff(before, engine.stats_snapshot())
        before = engine.stats_snapshot()
        ops.sum_(a.reshape(16, 16, 1) * b.reshape(1, 16, 16), axis=1)
        naive_diff = stats_diff(before, engine.stats_snapshot())

        for pid in SERVERS:
            assert dot_diff.party(pid).bytes == 2 * 256 * element
            assert naive_diff.party(pid).bytes == 2 * 4096 * element
        assert bool(np.all(_units_error(engine, product, exact) <= 16 * cfg.scale))

    def test_matrix_vector(self, engine: Engine) -> None:
        """Test une matrice par un vecteur."""
        m = engine.ss([[1.0, 2.0], [3.0, 4.0]])
        v = engine.ss([1.0, -1.0])
        np.testing.assert_allclose(engine.reveal(m @ v), [-1.0, -1.0], atol=2 * LSB)

    def test_inner_dimension_mismatch(self, engine: Engine) -> None:
        """Test des dimensions internes incompatibles."""
        with pytest.raises(ShapeError):
            ops.dot(engine.ss(np.ones((2, 3))), engine.ss(np.ones((2, 3))))
        with pytest.raises(ShapeError):
            ops.dot(engine.ss(1.0), engine.ss([1.0]))

    def test_outer(self, engine: Engine, rng: np.random.Generator) -> None:
        """Test outer([1],[1]) puis des vecteurs aléatoires."""
        unit = ops.outer(engine.ss([1.0]), engine.ss([1.0]))
        np.testing.assert_allclose(engine.reveal(unit), [[1.0]], atol=LSB)
        u, v = rng.uniform(-5, 5, 4), rng.uniform(-5, 5, 3)
        before = engine.stats_snapshot()
        result = ops.outer(engine.ss(u), engine.ss(v))
        diff = stats_diff(before, engine.stats_snapshot())
        np.testing.assert_allclose(engine.reveal(result), np.outer(u, v), atol=1e-9)
        assert diff.party(SERVERS[0]).bytes == 2 * 12 * engine.config.element_bytes

    def test_outer_rejects_matrices(self, engine: Engine) -> None:
        """Test que outer attend des vecteurs."""
        with pytest.raises(ShapeError):
            ops.outer(engine.ss(np.ones((2, 2))), engine.ss([1.0]))


class TestReindexing:
    """Tests pour les réindexations gratuites."""

    def test_reshape_flatten_round_trip(self, engine: Engine) -> None:
        """Test reshape puis flatten : ordre d'origine."""
        values = np.arange(12.0)
        x = engine.ss(values)
        before = engine.stats_snapshot()
        y = x.reshape(3, 4).T.T.flatten()
        assert _silent(stats_diff(before, engine.stats_snapshot()))
        np.testing.assert_array_equal(engine.reveal(y), values)

    def test_tile_and_repeat(self, engine: Engine) -> None:
        """Test les formes de tile et repeat contre numpy."""
        values = np.arange(6.0).reshape(2, 3)
        x = engine.ss(values)
        tiled = engine.reveal(x.tile((2, 1)))
        np.testing.assert_array_equal(tiled, np.tile(values, (2, 1)))
        np.testing.assert_array_equal(
            engine.reveal(x.repeat(2, axis=1)), np.repeat(values, 2, axis=1)
        )

    def test_getitem_and_set_item(self, engine: Engine) -> None:
        """Test l'indexation publique et le remplacement fonctionnel."""
        x = engine.ss(np.arange(6.0).reshape(2, 3))
        np.testing.assert_array_equal(engine.reveal(x[1, ::2]), [3.0, 5.0])
        updated = ops.set_item(x, (0, 0), 9.5)
        np.testing.assert_array_equal(engine.reveal(updated)[0], [9.5, 1.0, 2.0])
        replaced = ops.set_item(x, 1, engine.ss([7.0, 7.0, 7.0]))
        np.testing.assert_array_equal(engine.reveal(replaced)[1], [7.0, 7.0, 7.0])
        np.testing.assert_array_equal(engine.reveal(x)[0], [0.0, 1.0, 2.0])

    def test_private_index_rejected(self, engine: Engine) -> None:
        """Test qu'un indice partagé est refusé."""
        x = engine.ss([1.0, 2.0])
        with pytest.raises(TypeError):
            x[engine.ss(0.0)]

    def test_concatenate_and_stack(self, engine: Engine) -> None:
        """Test concatenate et stack."""
        a, b = engine.ss([1.0, 2.0]), engine.ss([3.0, 4.0])
        np.testing.assert_array_equal(
            engine.reveal(ops.concatenate([a, b])), [1.0, 2.0, 3.0, 4.0]
        )
        stacked = ops.stack([a, b], axis=1)
        assert stacked.shape == (2, 2)
        np.testing.assert_array_equal(engine.reveal(stacked), [[1.0, 3.0], [2.0, 4.0]])


class TestReductions:
    """Tests pour sum et mean."""

    def test_sum_is_free_and_exact(self, engine: Engine) -> None:
        """Test sum([1.5, 2.5]) = 4.0 sans message."""
        x = engine.ss([1.5, 2.5])
        before = engine.stats_snapshot()
        total = x.sum()
        assert _silent(stats_diff(before, engine.stats_snapshot()))
        assert float(engine.reveal(total)) == 4.0

    def test_sum_along_axis(self, engine: Engine) -> None:
        """Test la somme par colonne."""
        x = engine.ss([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(engine.reveal(x.sum(axis=0)), [4.0, 6.0])

    def test_mean(self, engine: Engine) -> None:
        """Test la moyenne par une multiplication publique."""
        x = engine.ss([[1.0, 2.0], [3.0, 6.0]])
        np.testing.assert_allclose(engine.reveal(x.mean(axis=1)), [1.5, 4.5], atol=LSB)
        np.testing.assert_allclose(float(engine.reveal(x.mean())), 3.0, atol=LSB)

    def test_mean_of_empty_axis(self, engine: Engine) -> None:
        """Test une moyenne sur un axe vide."""
        empty = engine.ss(np.zeros((2, 3)))[:, 0:0]
        with pytest.raises(EmptyAxisError):
            empty.mean(axis=1)

    def test_zeros_and_ones(self, engine: Engine) -> None:
        """Test les constantes publiques partagées."""
        np.testing.assert_array_equal(engine.reveal(ops.zeros(engine, 3)), [0, 0, 0])
        np.testing.assert_array_equal(engine.reveal(ops.ones(engine, (1, 2))), [[1, 1]])
