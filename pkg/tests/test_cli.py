import io
import json
from pathlib import Path

import numpy as np
import pytest

from swwlab.catalog.presets import preset
from swwlab.cli import (
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_SINGULAR,
    EXIT_USAGE,
    EXIT_VERIFY,
    RunConfig,
    cmd_eval,
    main,
    read_field_csv,
    table_field,
)
from swwlab.core import PhysParams, Point
from swwlab.verify import SystemKind, pde_residual, solution_residual

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list(capsys):
    code, out, _ = run(["list"], capsys)
    assert code == EXIT_OK
    names = [line.split()[0] for line in out.splitlines()]
    assert "ES_RANK2" in names and "SS_RANK2" in names and len(names) == 11


def test_list_family_slots(capsys):
    code, out, _ = run(["list", "--family", "ES_RANK2"], capsys)
    assert code == EXIT_OK
    assert "profiles: F, G" in out
    assert "h0=2" in out and "eps=1" in out


def test_list_unknown_family(capsys):
    assert run(["list", "--family", "NOPE"], capsys)[0] == EXIT_USAGE


def test_eval_constant_grid(tmp_path, capsys):
    cfg = {
        "solution": {"family": "E_GENERIC", "constants": {"u0": 0.1, "h0": 1.0},
                     "profiles": {"phi": {"kind": "sin", "A": 0.0}}},
        "grid": {"t": 0.0, "x": [0, 1, 2], "y": [0, 1, 2]},
    }
    code, out, _ = run(["eval", "--config", write_config(tmp_path, cfg)], capsys)
    assert code == EXIT_OK
    cols = read_field_csv(io.StringIO(out))
    assert len(cols["t"]) == 4
    assert np.all(cols["converged"] == 1)
    assert np.all(np.isnan(cols["r2"]))
    assert np.all(cols["h"] == 1.0)


def test_eval_crossing_bumps_config(tmp_path, capsys):
    out_path = tmp_path / "fig.csv"
    code, _, _ = run(["eval", "--config", str(CONFIGS / "crossing_bumps_centre.json"), "--out", str(out_path)], capsys)
    assert code == EXIT_OK
    cols = read_field_csv(out_path)
    assert np.all(cols["converged"] == 1)
    assert np.max(cols["h"]) >= 4.0 * (1 - 1e-6)


def test_eval_plotdata(tmp_path, capsys):
    cfg = {"solution": {"preset": "e_generic"}, "grid": {"t": [0, 0.1, 2], "x": [0, 1, 3], "y": [0, 1, 2]},
           "output": {"format": "plotdata"}}
    code, out, _ = run(["eval", "--config", write_config(tmp_path, cfg)], capsys)
    assert code == EXIT_OK
    blocks = out.split("\n\n\n")
    assert len(blocks) == 2
    assert blocks[0].startswith("# t = 0.0\n")
    rows = [line for line in blocks[0].splitlines() if line and not line.startswith("#")]
    assert len(rows) == 6
    assert len(rows[0].split()) == 9
    assert rows[0].split()[-2:] == ["1", "0"]


def test_eval_all_times_singular(tmp_path, capsys):
    cfg = {"solution": {"preset": "ss_sech_bump"}, "params": {"omega": 1.0},
           "grid": {"t": 0.0, "x": [-1, 1, 3], "y": [-1, 1, 3]}, "rsww": {"enabled": True, "shift": 0.0}}
    assert run(["eval", "--config", write_config(tmp_path, cfg)], capsys)[0] == EXIT_SINGULAR


def test_eval_partial_failure_exit_code():
    # Kink profiles vanish at the seed, where the depth is zero: cells there cannot be evaluated.
    cfg = RunConfig.from_dict({"solution": {"preset": "ss_kink"}, "grid": {"t": 0.0, "x": [-1, 1, 3], "y": 0.0}})
    assert cmd_eval(cfg, io.StringIO()) == EXIT_PARTIAL


def test_verify_periodic_family(tmp_path, capsys):
    cfg = {"solution": {"preset": "e_periodic"}, "grid": {"t": [-0.3, 0.3, 2], "x": [-0.5, 0.5, 2], "y": [-0.5, 0.5, 2]},
           "verify": {"samples": 10}}
    code, out, _ = run(["verify", "--config", write_config(tmp_path, cfg)], capsys)
    assert code == EXIT_OK, out
    assert out.strip().endswith("PASS")


def test_verify_non_smooth_table_fails(tmp_path, capsys):
    # A piecewise-linear profile has a kink at every knot; a self-steepening
    # acoustic wave does not carry it, so the differenced residual there is O(1).
    cfg = {
        "solution": {"family": "S_SIMPLE", "constants": {"lam1": 1.0, "lam2": 0.0},
                     "profiles": {"phi": {"kind": "custom_table", "knots": [-1, 0, 1], "values": [1, 2, 1],
                                          "interp": "linear"}}},
        "grid": {"t": [0, 0, 1], "x": [-1e-4, 1e-4, 2], "y": [0, 0, 1]},
        "verify": {"samples": 5},
    }
    code, out, _ = run(["verify", "--config", write_config(tmp_path, cfg)], capsys)
    assert code == EXIT_VERIFY, out
    assert out.strip().endswith("FAIL")


def test_verify_expected_rank(tmp_path, capsys):
    cfg = {"solution": {"preset": "ee_degenerate"}, "grid": {"t": [0, 0.2, 2], "x": [-0.5, 0.5, 2], "y": [-0.5, 0.5, 2]},
           "verify": {"samples": 8}}
    path = write_config(tmp_path, cfg)
    assert run(["verify", "--config", path, "--expect-rank", "1"], capsys)[0] == EXIT_OK
    assert run(["verify", "--config", path, "--expect-rank", "2"], capsys)[0] == EXIT_VERIFY


@pytest.mark.parametrize("omega", ["0.5", "2"])
def test_symmetry_command(omega, capsys):
    code, out, _ = run(["symmetry", "--omega", omega], capsys)
    assert code == EXIT_OK
    assert "[Y8, Y9] = +2 Y8" in out


def test_symmetry_too_few_samples(capsys):
    code, _, err = run(["symmetry", "--samples", "3"], capsys)
    assert code == EXIT_USAGE
    assert "DegenerateSamples" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = {"solution": {"preset": "e_generic"}, "grid": {"t": 0, "x": 0, "y": 0}, "bogus": 1}
    code, _, err = run(["eval", "--config", write_config(tmp_path, cfg)], capsys)
    assert code == EXIT_USAGE
    assert "bogus" in err


def test_bad_arguments_exit_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval"])
    assert exc.value.code == EXIT_USAGE
    assert run(["eval", "--config", "/nonexistent.json"], capsys)[0] == EXIT_USAGE


def test_csv_round_trip_preserves_residual(tmp_path, capsys):
    # Evaluate on exactly the stencil points of a centred 4th-order difference with
    # one Richardson halving, then difference the table read back from CSV.
    h = 1e-2
    c = Point(0.1, 0.2, -0.3)
    axis = lambda v: [v - 2 * h, v + 2 * h, 9]  # noqa: E731 - spacing h/2
    cfg = {"solution": {"preset": "e_generic"}, "grid": {"t": axis(c.t), "x": axis(c.x), "y": axis(c.y)},
           "solver": {"tol": 1e-14}}
    out_path = tmp_path / "stencil.csv"
    code, _, _ = run(["eval", "--config", write_config(tmp_path, cfg), "--out", str(out_path)], capsys)
    assert code == EXIT_OK
    field = table_field(read_field_csv(out_path), atol=1e-12)
    p = PhysParams(g=1.0)
    from_table = pde_residual(field, c, p, SystemKind.SWW, h).max_abs
    direct = solution_residual(preset("e_generic", p), c, p, SystemKind.SWW, h).max_abs
    assert direct > 0
    assert direct / 2 <= from_table <= 2 * direct
