"""
Tests pour les commandes run, bench et demo.
"""

import json
from io import StringIO
from pathlib import Path

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from runs.models import RunRecord
from tensor.io import read_csv, write_csv

PRODUCT = "(reveal (mul (priv x (2)) (priv y (2))))\n"

LOOP = """
(public n 4)
(assign z (call zeros (4)))
(loop i 0 n (assign (idx z i) (mul (idx (priv x (4)) i) (idx (priv y (4)) i))))
(reveal z)
"""


def _call(*args: str) -> str:
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


@pytest.fixture
def product_files(tmp_path: Path) -> dict[str, Path]:
    program = tmp_path / "product.qmp"
    program.write_text(PRODUCT)
    write_csv(tmp_path / "x.csv", [1.0, 2.0])
    write_csv(tmp_path / "y.csv", [3.0, 4.0])
    return {"program": program, "x": tmp_path / "x.csv", "y": tmp_path / "y.csv"}


@pytest.fixture
def loop_files(tmp_path: Path) -> dict[str, Path]:
    program = tmp_path / "loop.qmp"
    program.write_text(LOOP)
    write_csv(tmp_path / "x.csv", [1.0, 2.0, 3.0, 4.0])
    write_csv(tmp_path / "y.csv", [0.5, 0.5, 0.5, 0.5])
    return {"program": program, "x": tmp_path / "x.csv", "y": tmp_path / "y.csv"}


def _run_args(files: dict[str, Path], out: Path, *extra: str) -> list[str]:
    return [
        "run",
        str(files["program"]),
        "--input",
        f"x={files['x']}",
        "--input",
        f"y={files['y']}",
        "--output-dir",
        str(out),
        "--stats",
        str(out / "stats.json"),
        *extra,
    ]


@pytest.mark.django_db
class TestRunCommand:
    """Tests de la commande run."""

    def test_product(self, product_files: dict[str, Path], tmp_path: Path) -> None:
        """Test [1,2]·[3,4] : sortie [3,8] en une ronde."""
        out = tmp_path / "out"
        _call(*_run_args(product_files, out))

        np.testing.assert_allclose(read_csv(out / "out0.csv"), [3.0, 8.0], atol=1e-9)
        stats = json.loads((out / "stats.json").read_text())
        assert stats["total_rounds"] == 1
        assert set(stats["parties"]) == {"S1", "S2", "Sa", "Sb"}
        assert stats["wall_ms"] is None
        record = RunRecord.objects.get()
        assert record.status == RunRecord.Status.SUCCESS
        assert record.stats == stats

    def test_loop_rounds(self, loop_files: dict[str, Path], tmp_path: Path) -> None:
        """Test la boucle : n rondes sans optimisation, une seule avec."""
        plain, optimized = tmp_path / "plain", tmp_path / "optimized"
        _call(*_run_args(loop_files, plain, "--no-optimize"))
        _call(*_run_args(loop_files, optimized))

        for out, rounds in ((plain, 4), (optimized, 1)):
            stats = json.loads((out / "stats.json").read_text())
            assert stats["total_rounds"] == rounds
            np.testing.assert_allclose(
                read_csv(out / "z.csv"), [0.5, 1.0, 1.5, 2.0], atol=1e-9
            )

    def test_param_override(
        self, loop_files: dict[str, Path], tmp_path: Path
    ) -> None:
        """Test --param n=2 : seules les deux premières cases sont calculées."""
        out = tmp_path / "out"
        _call(*_run_args(loop_files, out, "--param", "n=2"))

        np.testing.assert_allclose(
            read_csv(out / "z.csv"), [0.5, 1.0, 0.0, 0.0], atol=1e-9
        )

    def test_wall_clock(self, product_files: dict[str, Path], tmp_path: Path) -> None:
        """Test --wall-clock renseigne wall_ms."""
        out = tmp_path / "out"
        _call(*_run_args(product_files, out, "--wall-clock"))

        stats = json.loads((out / "stats.json").read_text())
        assert stats["wall_ms"] >= 0

    def test_missing_input_file(
        self, product_files: dict[str, Path], tmp_path: Path
    ) -> None:
        """Test un fichier d'entrée absent : code 2 et aucune sortie."""
        out = tmp_path / "out"
        product_files["y"] = tmp_path / "absent.csv"

        with pytest.raises(CommandError) as excinfo:
            _call(*_run_args(product_files, out))
        assert excinfo.value.returncode == 2
        assert not out.exists()
        assert not RunRecord.objects.exists()

    @pytest.mark.parametrize(
        "extra",
        [
            ("--param", "m=2"),
            ("--param", "n"),
            ("--param", "n=abc"),
            ("--n", "200"),
            ("--latency", "satellite"),
        ],
    )
    def test_usage_errors(
        self, loop_files: dict[str, Path], tmp_path: Path, extra: tuple[str, ...]
    ) -> None:
        """Test les erreurs d'usage : code 2."""
        with pytest.raises(CommandError) as excinfo:
            _call(*_run_args(loop_files, tmp_path / "out", *extra))
        assert excinfo.value.returncode == 2

    def test_missing_program(self, tmp_path: Path) -> None:
        """Test un programme introuvable : code 2."""
        with pytest.raises(CommandError) as excinfo:
            _call("run", str(tmp_path / "absent.qmp"))
        assert excinfo.value.returncode == 2

    def test_rejected_program(self, tmp_path: Path) -> None:
        """Test une branche sur une condition privée : code 1, exécution tracée."""
        program = tmp_path / "branch.qmp"
        program.write_text(
            "(assign x (priv x ()))\n"
            "(branch (call lt x 0) (then (reveal x)) (else (reveal x)))\n"
        )
        write_csv(tmp_path / "x.csv", 1.0)

        with pytest.raises(CommandError) as excinfo:
            _call("run", str(program), "--input", f"x={tmp_path / 'x.csv'}")
        assert excinfo.value.returncode == 1
        assert "RejectionError" in str(excinfo.value)
        record = RunRecord.objects.get()
        assert record.status == RunRecord.Status.ENGINE_ERROR

    def test_shape_mismatch(
        self, product_files: dict[str, Path], tmp_path: Path
    ) -> None:
        """Test une entrée de mauvaise forme : code 1."""
        write_csv(product_files["x"], [1.0, 2.0, 3.0])

        with pytest.raises(CommandError) as excinfo:
            _call(*_run_args(product_files, tmp_path / "out"))
        assert excinfo.value.returncode == 1
        assert "ShapeError" in str(excinfo.value)


@pytest.mark.django_db
class TestBenchCommand:
    """Tests de la commande bench."""

    def test_mul(self, tmp_path: Path) -> None:
        """Test mul : 2·(n/8) octets par élément et par serveur, une ronde."""
        stats_path = tmp_path / "stats.json"
        _call("bench", "mul", "--size", "1000", "--stats", str(stats_path))

        stats = json.loads(stats_path.read_text())
        assert stats["total_rounds"] == 1
        for party in stats["parties"].values():
            assert party["bytes"] == 2 * (128 // 8) * 1000
            assert party["rounds"] == 1

    @pytest.mark.parametrize("extra,rounds", [((), 17), (("--ppa",), 6)])
    def test_cmp_rounds(
        self, tmp_path: Path, extra: tuple[str, ...], rounds: int
    ) -> None:
        """Test cmp sur Z_2^16 : propagation n+1 rondes, préfixes 2+log2(n)."""
        stats_path = tmp_path / "stats.json"
        _call(
            "bench",
            "cmp",
            "--size",
            "1",
            "--n",
            "16",
            "--d",
            "4",
            "--stats",
            str(stats_path),
            *extra,
        )

        assert json.loads(stats_path.read_text())["total_rounds"] == rounds

    def test_summary_output(self) -> None:
        """Test le résumé affiché."""
        output = json.loads(_call("bench", "ot", "--size", "10"))
        assert output["op"] == "ot"
        assert output["size"] == 10
        assert output["stats"]["total_rounds"] == 1
        assert RunRecord.objects.get().target == "ot×10"

    @pytest.mark.parametrize(
        "args", [("mul", "--size", "0"), ("div", "--size", "10")]
    )
    def test_usage_errors(self, args: tuple[str, ...]) -> None:
        """Test une taille nulle ou une opération inconnue : code 2."""
        with pytest.raises(CommandError) as excinfo:
            _call("bench", *args)
        assert excinfo.value.returncode == 2


@pytest.mark.slow
@pytest.mark.django_db
class TestDemoCommand:
    """Tests de la commande demo."""

    def test_stats_are_deterministic(self, tmp_path: Path) -> None:
        """Test deux exécutions avec la même graine : JSON identiques."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for path in (first, second):
            _call("demo", "nn", "--seed", "1", "--stats", str(path))

        assert first.read_bytes() == second.read_bytes()
        assert RunRecord.objects.filter(command="demo").count() == 2

    def test_unknown_demo(self) -> None:
        """Test une démonstration inconnue : code 2."""
        with pytest.raises(CommandError) as excinfo:
            _call("demo", "svm")
        assert excinfo.value.returncode == 2
