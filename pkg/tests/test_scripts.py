import importlib.util
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_convergence_script(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert load("convergence").main(["--n", "100,1000", "--trials", "5", "-o", str(out)]) == 0
    assert "slope morse_b0" in capsys.readouterr().out and out.exists()


def test_betti0_curves_script(tmp_path):
    assert load("betti0_curves").main(["--out-dir", str(tmp_path), "--grid", "4", "--kappas", "1"]) == 0
    lines = (tmp_path / "betti0_vmf_kappa1.csv").read_text().splitlines()
    assert lines[0] == "x,r" and len(lines) == 5 and len(list(tmp_path.iterdir())) == 3


def test_circle_barcodes_script(capsys):
    assert load("circle_barcodes").main(["--n", "12", "--draws", "5"]) == 0
    assert "5/5 draws" in capsys.readouterr().out
