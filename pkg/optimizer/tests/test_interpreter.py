"""
Tests pour l'interpréteur : partage des entrées, calcul et révélation.
"""

import numpy as np
import pytest
from scipy.special import expit

from optimizer.analysis import estimate_cost
from optimizer.exceptions import ProgramSyntaxError
from optimizer.interpreter import Interpreter, interpret
from optimizer.ir import Program
from optimizer.passes import optimize
from optimizer.sexpr import parse_program
from sharing.engine import Engine
from tensor.exceptions import ShapeError

PRODUCT = "(reveal (mul (priv x (2)) (priv y (2))))"

LOOP = """
(assign z (call zeros (4)))
(loop i 0 4 (assign (idx z i) (mul (idx (priv x (4)) i) (idx (priv y (4)) i))))
(reveal z)
"""

MATRIX_FACTORIZATION = """
(public gamma 0.05)
(public lamb 0.01)
(assign x (priv x (6 4)))
(assign P (priv p0 (6 2)))
(assign Q (priv q0 (4 2)))
(loop t 0 20
  (assign e (sub x (dot P (call transpose Q))))
  (assign Q (add Q (mul gamma (sub (dot (call transpose e) P) (mul lamb Q)))))
  (assign P (add P (mul gamma (sub (dot e Q) (mul lamb P))))))
(reveal P)
(reveal Q)
"""


def _run(program: Program, bindings: dict[str, np.ndarray]) -> Interpreter:
    interpreter = Interpreter(Engine(seed=9, debug_checks=True))
    interpreter.share_inputs(program, bindings)
    interpreter.execute(program)
    return interpreter


class TestInterpret:
    """Test des exécutions de bout en bout"""

    def test_elementwise_product(self) -> None:
        """Test [1,2]·[3,4] en un seul tour"""
        program = parse_program(PRODUCT)
        interpreter = _run(
            program, {"x": np.array([1.0, 2.0]), "y": np.array([3.0, 4.0])}
        )
        outputs = interpreter.reveal_outputs()

        np.testing.assert_allclose(outputs["out0"], [3.0, 8.0], atol=1e-9)
        assert interpreter.phases["compute"].total_rounds == 1

    def test_loop_rounds_before_and_after_optimization(self) -> None:
        """Test la boucle coûte un tour par itération, un seul une fois vectorisée"""
        program = parse_program(LOOP)
        bindings = {"x": np.arange(4.0), "y": np.full(4, 0.5)}

        plain = _run(program, bindings)
        vectorized = _run(optimize(program), bindings)

        assert plain.phases["compute"].total_rounds == 4
        assert vectorized.phases["compute"].total_rounds == 1
        np.testing.assert_allclose(
            vectorized.reveal_outputs()["z"], [0.0, 0.5, 1.0, 1.5], atol=1e-9
        )

    def test_empty_program(self) -> None:
        """Test un programme vide ne produit aucune sortie"""
        assert interpret(parse_program(""), {}, Engine(seed=1)) == {}

    def test_logistic(self) -> None:
        """Test la sigmoïde privée reste proche de la référence"""
        x = np.linspace(-4.0, 4.0, 9)
        program = parse_program("(reveal (call logistic (priv x (9))))")

        outputs = interpret(program, {"x": x}, Engine(seed=2))

        np.testing.assert_allclose(outputs["out0"], expit(x), atol=1e-2)

    def test_public_only_program(self) -> None:
        """Test un programme public ne communique pas pendant le calcul"""
        program = parse_program("(public a 2)\n(reveal (mul a (call ones (3))))")
        interpreter = _run(program, {})

        assert interpreter.phases["compute"].total_rounds == 0
        np.testing.assert_array_equal(interpreter.reveal_outputs()["out0"], [2, 2, 2])

    def test_store_into_public_array(self) -> None:
        """Test une affectation indexée dans un tableau public"""
        program = parse_program(
            "(assign z (call zeros (3)))\n(assign (idx z 1) 5)\n(reveal z)"
        )

        outputs = interpret(program, {}, Engine(seed=1))

        np.testing.assert_array_equal(outputs["z"], [0.0, 5.0, 0.0])

    def test_store_share_promotes_public_base(self) -> None:
        """Test affecter un partage dans un tableau public le rend privé"""
        program = parse_program(
            "(assign z (call ones (3)))\n(assign (idx z 2) (priv x ()))\n(reveal z)"
        )

        outputs = interpret(program, {"x": np.float64(-1.25)}, Engine(seed=1))

        np.testing.assert_allclose(outputs["z"], [1.0, 1.0, -1.25], atol=1e-9)

    @pytest.mark.parametrize("flag,expected", [(1, 2.0), (0, 3.0)])
    def test_public_branch(self, flag: int, expected: float) -> None:
        """Test une branche sur une condition publique suit le bon bras"""
        program = parse_program(
            f"(public flag {flag})\n"
            "(branch flag (then (assign r 2)) (else (assign r 3)))\n"
            "(reveal r)"
        )

        assert interpret(program, {}, Engine(seed=1))["r"] == expected


class TestInputs:
    """Test de la validation des entrées privées"""

    def test_missing_input(self) -> None:
        """Test une entrée privée absente"""
        with pytest.raises(ProgramSyntaxError, match="manquantes"):
            interpret(parse_program(PRODUCT), {"x": np.zeros(2)}, Engine(seed=1))

    def test_wrong_shape(self) -> None:
        """Test une entrée de mauvaise forme"""
        with pytest.raises(ShapeError):
            interpret(
                parse_program(PRODUCT),
                {"x": np.zeros(3), "y": np.zeros(2)},
                Engine(seed=1),
            )

    def test_one_client_per_input(self) -> None:
        """Test chaque entrée est partagée et visible dans l'environnement"""
        program = parse_program(PRODUCT)
        interpreter = _run(program, {"x": np.ones(2), "y": np.ones(2)})

        assert set(interpreter.inputs) == {"x", "y"}
        assert interpreter.phases["share"].total_rounds >= 1


class TestMatrixFactorization:
    """Test de la factorisation de matrice par descente de gradient"""

    @pytest.fixture
    def bindings(self) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(3)
        left = rng.uniform(0.0, 1.0, (6, 2))
        right = rng.uniform(0.0, 1.0, (4, 2))
        return {
            "x": left @ right.T,
            "p0": rng.uniform(0.0, 1.0, (6, 2)),
            "q0": rng.uniform(0.0, 1.0, (4, 2)),
        }

    @staticmethod
    def _reference(
        bindings: dict[str, np.ndarray],
    ) -> tuple[np.ndarray, np.ndarray]:
        x, p, q = bindings["x"], bindings["p0"].copy(), bindings["q0"].copy()
        for _ in range(20):
            e = x - p @ q.T
            q = q + 0.05 * (e.T @ p - 0.01 * q)
            p = p + 0.05 * (e @ q - 0.01 * p)
        return p, q

    def test_matches_float_reference(self, bindings: dict[str, np.ndarray]) -> None:
        """Test P et Q suivent la même descente qu'en flottant"""
        outputs = interpret(
            parse_program(MATRIX_FACTORIZATION), bindings, Engine(seed=4)
        )
        p, q = self._reference(bindings)

        np.testing.assert_allclose(outputs["P"], p, atol=1e-6)
        np.testing.assert_allclose(outputs["Q"], q, atol=1e-6)

    def test_error_decreases(self, bindings: dict[str, np.ndarray]) -> None:
        """Test l'erreur de reconstruction diminue"""
        outputs = interpret(
            parse_program(MATRIX_FACTORIZATION), bindings, Engine(seed=4)
        )
        x = bindings["x"]
        before = np.linalg.norm(x - bindings["p0"] @ bindings["q0"].T)
        after = np.linalg.norm(x - outputs["P"] @ outputs["Q"].T)

        assert after < before

    def test_estimate(self) -> None:
        """Test trois produits matriciels par itération"""
        estimate = estimate_cost(parse_program(MATRIX_FACTORIZATION))

        assert estimate.dot_count == 60
        assert estimate.round_estimate == 60
