"""
Tests pour les passes de réécriture et l'estimation de coût.
"""

from collections.abc import Callable

import numpy as np
import pytest

from optimizer.analysis import estimate_cost
from optimizer.cost import CostModel
from optimizer.interpreter import interpret
from optimizer.ir import Program
from optimizer.passes import (
    optimize,
    pass_common_factor,
    pass_vectorize_expr,
    pass_vectorize_loops,
)
from optimizer.sexpr import parse_program
from sharing.engine import Engine

ULP = 2.0**-40

ELEMENTWISE_LOOP = """
(public n 4)
(assign z (call zeros (4)))
(loop i 0 n (assign (idx z i) (mul (idx (priv x (4)) i) (idx (priv y (4)) i))))
(reveal z)
"""

DEPENDENT_LOOP = """
(assign z (call zeros (4)))
(assign (idx z 0) (idx (priv x (4)) 0))
(loop i 1 4 (assign (idx z i) (add (idx z (sub i 1)) (idx (priv x (4)) i))))
(reveal z)
"""

NESTED_LOOPS = """
(assign z (call zeros (3 2)))
(loop i 0 3
  (loop j 0 2
    (assign (idx z i j) (mul (idx (priv x (3 2)) i j) (idx (priv y (3 2)) i j)))))
(reveal z)
"""

SHIFTED_LOOP = """
(assign z (call zeros (3)))
(loop i 0 3
  (assign (idx z i)
          (call relu (sub (idx (priv x (4)) (add i 1)) (mul 2 (idx (priv x (4)) i))))))
(reveal z)
"""

COMMON_FACTOR = """
(assign x (priv x (3)))
(assign s (add (mul x (priv a (3))) (mul x (priv b (3))) (mul x (priv c (3)))))
(reveal s)
"""

NO_COMMON_FACTOR = """
(assign s (add (mul (priv x ()) (priv a ())) (mul (priv y ()) (priv b ()))))
(reveal s)
"""

PRODUCT_SUM = """
(assign s (add (mul (priv x1 ()) (priv y1 ())) (mul (priv x2 ()) (priv y2 ()))
               (mul (priv x3 ()) (priv y3 ()))))
(reveal s)
"""

MIXED_SHAPES = """
(assign s (add (mul (priv u (3)) (priv v (3))) (mul (priv p ()) (priv q ())) 1))
(reveal s)
"""

CORPUS = [
    ELEMENTWISE_LOOP,
    DEPENDENT_LOOP,
    NESTED_LOOPS,
    SHIFTED_LOOP,
    COMMON_FACTOR,
    NO_COMMON_FACTOR,
    PRODUCT_SUM,
    MIXED_SHAPES,
]

PASSES: list[Callable[[Program], Program]] = [
    pass_vectorize_loops,
    pass_common_factor,
    pass_vectorize_expr,
]


def _bindings(program: Program, seed: int = 11) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    return {
        name: rng.uniform(-4, 4, size=shape)
        for name, shape in program.private_inputs().items()
    }


def _run(program: Program, bindings: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return interpret(program, bindings, Engine(seed=5, debug_checks=True))


class TestVectorizeLoops:
    """Tests pour pass_vectorize_loops."""

    def test_elementwise_loop(self) -> None:
        """Test la boucle z[i] = x[i]·y[i] devient un seul produit."""
        result = pass_vectorize_loops(parse_program(ELEMENTWISE_LOOP))
        expected = parse_program(
            """
            (public n 4)
            (assign z (call zeros (4)))
            (assign (idx z (slice 0 4))
                    (mul (idx (priv x (4)) (slice 0 4)) (idx (priv y (4)) (slice 0 4))))
            (reveal z)
            """
        )
        assert result == expected

    def test_rounds_drop_from_n_to_one(self) -> None:
        """Test round_estimate n → 1."""
        program = parse_program(ELEMENTWISE_LOOP)
        before = estimate_cost(program)
        after = estimate_cost(pass_vectorize_loops(program))
        assert (before.round_estimate, before.mul_count) == (4, 4)
        assert (after.round_estimate, after.mul_count) == (1, 1)
        assert before.message_estimate == after.message_estimate == 8

    def test_dependent_loop_unchanged(self) -> None:
        """Test z[i] = z[i-1] + x[i] reste une boucle."""
        program = parse_program(DEPENDENT_LOOP)
        assert pass_vectorize_loops(program) == program

    def test_nested_loops(self) -> None:
        """Test deux boucles imbriquées indépendantes."""
        result = pass_vectorize_loops(parse_program(NESTED_LOOPS))
        expected = parse_program(
            """
            (assign z (call zeros (3 2)))
            (assign (idx z (slice 0 3) (slice 0 2))
                    (mul (idx (priv x (3 2)) (slice 0 3) (slice 0 2))
                         (idx (priv y (3 2)) (slice 0 3) (slice 0 2))))
            (reveal z)
            """
        )
        assert result == expected
        assert estimate_cost(result).round_estimate == 1

    def test_shifted_reads(self) -> None:
        """Test les lectures décalées x[i + 1] sous une fonction élémentaire."""
        result = pass_vectorize_loops(parse_program(SHIFTED_LOOP))
        expected = parse_program(
            """
            (assign z (call zeros (3)))
            (assign (idx z (slice 0 3))
                    (call relu (sub (idx (priv x (4)) (slice 1 4))
                                    (mul 2 (idx (priv x (4)) (slice 0 3))))))
            (reveal z)
            """
        )
        assert result == expected

    def test_offset_out_of_range(self) -> None:
        """Test une lecture x[i + 1] qui sortirait du tableau."""
        program = parse_program(
            "(assign z (call zeros (4)))\n"
            "(loop i 0 4 (assign (idx z i) (idx (priv x (4)) (add i 1))))"
        )
        assert pass_vectorize_loops(program) == program

    def test_loop_invariant_vector_blocks(self) -> None:
        """Test un opérande invariant non scalaire empêche la vectorisation."""
        program = parse_program(
            "(assign z (call zeros (2 3)))\n"
            "(loop i 0 2 (assign (idx z i) (mul (idx (priv x (2 3)) i) (priv w (3)))))"
        )
        assert pass_vectorize_loops(program) == program

    def test_loop_variable_as_value(self) -> None:
        """Test une boucle qui lit sa variable comme valeur reste telle quelle."""
        program = parse_program(
            "(assign z (call zeros (4)))\n"
            "(loop i 0 4 (assign (idx z i) (mul i (idx (priv x (4)) i))))"
        )
        assert pass_vectorize_loops(program) == program

    @pytest.mark.parametrize("text", [ELEMENTWISE_LOOP, NESTED_LOOPS, SHIFTED_LOOP])
    def test_same_outputs(self, text: str) -> None:
        """Test le programme vectorisé révèle les mêmes valeurs (1 ulp)."""
        program = parse_program(text)
        bindings = _bindings(program)
        before = _run(program, bindings)
        after = _run(pass_vectorize_loops(program), bindings)
        for name, value in before.items():
            np.testing.assert_allclose(after[name], value, rtol=0, atol=ULP)


class TestCommonFactor:
    """Tests pour pass_common_factor."""

    def test_factor_extracted(self) -> None:
        """Test x·a + x·b + x·c → x·(a + b + c)."""
        result = pass_common_factor(parse_program(COMMON_FACTOR))
        expected = parse_program(
            """
            (assign x (priv x (3)))
            (assign s (mul x (add (priv a (3)) (priv b (3)) (priv c (3)))))
            (reveal s)
            """
        )
        assert result == expected

    def test_mul_count(self) -> None:
        """Test mul_count 3 → 1."""
        program = parse_program(COMMON_FACTOR)
        assert estimate_cost(program).mul_count == 3
        assert estimate_cost(pass_common_factor(program)).mul_count == 1

    def test_no_common_factor(self) -> None:
        """Test une somme sans facteur commun reste inchangée."""
        program = parse_program(NO_COMMON_FACTOR)
        assert pass_common_factor(program) == program

    def test_right_factor(self) -> None:
        """Test le facteur commun à droite reste à droite."""
        program = parse_program("(reveal (add (mul a x) (mul b x)))")
        expected = parse_program("(reveal (mul (add a b) x))")
        assert pass_common_factor(program) == expected

    def test_two_groups(self) -> None:
        """Test x·a + y·b + x·c + y·d → x·(a + c) + y·(b + d)."""
        program = parse_program(
            "(reveal (add (mul x a) (mul y b) (mul x c) (mul y d)))"
        )
        expected = parse_program("(reveal (add (mul x (add a c)) (mul y (add b d))))")
        assert pass_common_factor(program) == expected

    def test_subtraction_not_factored(self) -> None:
        """Test x·a - x·b n'est pas réassocié."""
        program = parse_program("(reveal (sub (mul x a) (mul x b)))")
        assert pass_common_factor(program) == program

    def test_same_outputs_within_four_ulps(self) -> None:
        """Test trois troncatures contre une : écart inférieur à 4·2^-d."""
        program = parse_program(COMMON_FACTOR)
        bindings = _bindings(program)
        before = _run(program, bindings)["s"]
        after = _run(pass_common_factor(program), bindings)["s"]
        np.testing.assert_allclose(after, before, rtol=0, atol=4 * ULP)


class TestVectorizeExpr:
    """Tests pour pass_vectorize_expr."""

    def test_dot_of_packs(self) -> None:
        """Test x1·y1 + x2·y2 + x3·y3 → dot de deux paquets."""
        result = pass_vectorize_expr(parse_program(PRODUCT_SUM))
        expected = parse_program(
            """
            (assign s (dot (pack (priv x1 ()) (priv x2 ()) (priv x3 ()))
                           (pack (priv y1 ()) (priv y2 ()) (priv y3 ()))))
            (reveal s)
            """
        )
        assert result == expected

    def test_cost(self) -> None:
        """Test trois produits d'une ronde chacun → un produit scalaire."""
        program = parse_program(PRODUCT_SUM)
        before = estimate_cost(program)
        after = estimate_cost(pass_vectorize_expr(program))
        assert (before.mul_count, before.round_estimate) == (3, 3)
        assert (after.mul_count, after.dot_count, after.round_estimate) == (0, 1, 1)
        assert after.message_estimate < before.message_estimate

    def test_single_product_unchanged(self) -> None:
        """Test un seul produit reste tel quel."""
        program = parse_program("(reveal (add (mul (priv x ()) (priv y ())) 1))")
        assert pass_vectorize_expr(program) == program

    def test_public_products_unchanged(self) -> None:
        """Test des produits par des constantes ne sont pas empaquetés."""
        program = parse_program(
            "(reveal (add (mul (priv x ()) 2) (mul (priv y ()) 3)))"
        )
        assert pass_vectorize_expr(program) == program

    def test_mixed_shapes(self) -> None:
        """Test des produits de formes différentes et un terme restant."""
        program = parse_program(MIXED_SHAPES)
        bindings = _bindings(program)
        revealed = _run(pass_vectorize_expr(program), bindings)["s"]
        expected = bindings["u"] * bindings["v"] + bindings["p"] * bindings["q"] + 1
        np.testing.assert_allclose(revealed, expected, atol=1e-9)

    def test_same_outputs_within_four_ulps(self) -> None:
        """Test trois troncatures contre une : écart inférieur à 4·2^-d."""
        program = parse_program(PRODUCT_SUM)
        bindings = _bindings(program)
        before = _run(program, bindings)["s"]
        after = _run(pass_vectorize_expr(program), bindings)["s"]
        np.testing.assert_allclose(after, before, rtol=0, atol=4 * ULP)


def _assert_equivalent(
    program: Program, rewritten: Program, atol: float, seeds: int = 100
) -> None:
    for seed in range(seeds):
        bindings = _bindings(program, seed)
        before = _run(program, bindings)
        after = _run(rewritten, bindings)
        assert after.keys() == before.keys()
        for name, value in before.items():
            np.testing.assert_allclose(
                after[name], value, rtol=0, atol=atol, err_msg=f"graine {seed}"
            )


@pytest.mark.slow
class TestRandomBindings:
    """Tests d'équivalence sur 100 jeux d'entrées aléatoires."""

    @pytest.mark.parametrize("text", [ELEMENTWISE_LOOP, NESTED_LOOPS, SHIFTED_LOOP])
    def test_vectorized_loops(self, text: str) -> None:
        """Test boucle et version vectorisée : au plus 1 ulp d'écart."""
        program = parse_program(text)
        _assert_equivalent(program, pass_vectorize_loops(program), ULP)

    def test_common_factor(self) -> None:
        """Test x·a + x·b + x·c et x·(a + b + c) : moins de 4 ulp d'écart."""
        program = parse_program(COMMON_FACTOR)
        _assert_equivalent(program, pass_common_factor(program), 4 * ULP)

    def test_expression_to_dot(self) -> None:
        """Test somme de produits et produit scalaire : moins de 4 ulp d'écart."""
        program = parse_program(PRODUCT_SUM)
        _assert_equivalent(program, pass_vectorize_expr(program), 4 * ULP)


class TestPassProperties:
    """Tests pour l'idempotence et la monotonie du coût."""

    @pytest.mark.parametrize("rewrite", PASSES, ids=lambda p: p.__name__)
    @pytest.mark.parametrize("text", CORPUS)
    def test_idempotent(self, rewrite: Callable[[Program], Program], text: str) -> None:
        """Test pass(pass(p)) == pass(p)."""
        once = rewrite(parse_program(text))
        assert rewrite(once) == once

    @pytest.mark.parametrize("rewrite", PASSES, ids=lambda p: p.__name__)
    @pytest.mark.parametrize("text", CORPUS)
    def test_cost_never_increases(
        self, rewrite: Callable[[Program], Program], text: str
    ) -> None:
        """Test produits (mul + dot) et rondes ne croissent jamais."""
        program = parse_program(text)
        before = estimate_cost(program)
        after = estimate_cost(rewrite(program))
        assert after.mul_count + after.dot_count <= before.mul_count + before.dot_count
        assert after.round_estimate <= before.round_estimate

    def test_optimize_runs_all_passes(self) -> None:
        """Test optimize sur la boucle : une seule ronde."""
        result = optimize(parse_program(ELEMENTWISE_LOOP))
        assert estimate_cost(result).round_estimate == 1


class TestEstimateCost:
    """Tests pour estimate_cost."""

    def test_comparison_rounds(self) -> None:
        """Test une comparaison : n + 1 rondes, ou 2 + ⌈log2(n - 1)⌉ en PPA."""
        program = parse_program("(reveal (call lt (priv x (3)) 0))")
        assert estimate_cost(program).round_estimate == 129
        ppa = estimate_cost(program, CostModel(ring_bits=128, ppa=True))
        assert ppa.round_estimate == 9
        assert ppa.bit_estimate == 255 * 3

    def test_relu(self) -> None:
        """Test relu : une comparaison et un OT."""
        report = estimate_cost(parse_program("(reveal (call relu (priv x (5))))"))
        assert (report.compare_count, report.ot_count) == (1, 1)
        assert report.round_estimate == 130
        assert report.message_estimate == 20

    def test_public_program_is_free(self) -> None:
        """Test un programme sans entrée privée ne coûte rien."""
        program = parse_program("(public a 2)\n(reveal (mul a (call exp a)))")
        report = estimate_cost(program)
        assert report.as_dict() == dict.fromkeys(report.as_dict(), 0)

    def test_loop_scales_body(self) -> None:
        """Test le coût d'un corps de boucle multiplié par le nombre de tours."""
        program = parse_program(
            "(assign s (priv x ()))\n(loop i 0 7 (assign s (mul s s)))\n(reveal s)"
        )
        assert estimate_cost(program).mul_count == 7

    def test_public_branch_takes_known_arm(self) -> None:
        """Test une condition connue ne compte que la branche prise."""
        program = parse_program(
            "(public flag 0)\n"
            "(assign x (priv x ()))\n"
            "(branch flag (then (assign y (mul x x))) (else (assign y x)))"
        )
        assert estimate_cost(program).mul_count == 0

    def test_iterative_kernel_cost(self) -> None:
        """Test exp : une ronde par élévation au carré."""
        report = estimate_cost(parse_program("(reveal (call exp (priv x (2)) 5))"))
        assert report.mul_count == report.round_estimate == 5
