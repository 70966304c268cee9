import json

import numpy as np
import pytest

import hingechain as hc
from hingechain.chainfile import format_chain, parse_chain_text
from hingechain.cli import main
from hingechain.errors import ChainFormatError

PLANAR_3R = """\
hingechain/1
# three collinear point hinges
dimension 2
hinge 1 0
hinge 2 0
hinge 3 0
endpoint 4 0
"""

PANEL_3D = """\
hingechain/1
dimension 3
hinge 1 0 0 | 0 1 0
hinge 2 0 0 | 0 1 0
endpoint 3 0 0
panel 0 0 1
panel 0 0 1
panel 0 0 1
label flat-two-hinge
"""

DEGENERATE = """\
hingechain/1
dimension 2
hinge 0 0
endpoint 1 0
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_round_trip():
    loaded = parse_chain_text(PANEL_3D)
    assert isinstance(loaded, hc.PanelChainSpec)
    assert loaded.label == "flat-two-hinge"
    text = format_chain(loaded, label=loaded.label)
    again = parse_chain_text(text)
    assert np.allclose(again.chain.feet, loaded.chain.feet)
    assert np.allclose(again.panel_normals, loaded.panel_normals)


def test_parse_errors_carry_line_numbers():
    bad = PLANAR_3R.replace("hinge 2 0", "hinge 2 zero")
    with pytest.raises(ChainFormatError) as err:
        parse_chain_text(bad)
    assert err.value.line == 5
    assert "hinge" in str(err.value)
    with pytest.raises(ChainFormatError) as err2:
        parse_chain_text("dimension 2\nhinge 1 0\nendpoint 2 0\n")
    assert "header" in str(err2.value)
    with pytest.raises(ChainFormatError):
        parse_chain_text("hingechain/1\ndimension 3\nhinge 1 0 0\nendpoint 2 0 0\n")


def test_parse_orthonormalizes_with_warning():
    text = (
        "hingechain/1\ndimension 3\n"
        "hinge 1 0 0 | 0 2 1\n"
        "endpoint 3 0 0\n"
    )
    with pytest.warns(UserWarning):
        chain = parse_chain_text(text)
    assert np.linalg.norm(chain.hinges[0].directions[0]) == pytest.approx(1.0)


def test_cmd_fk(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["fk", path, "--theta", "0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "squared_distance: 16.0" in out
    assert "endpoint: 4.0 0.0" in out


def test_cmd_fk_structured_round_trip(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["fk", path, "--theta", "0.3,1.2,2.0", "--format", "structured"]) == 0
    out = capsys.readouterr().out
    data = json.loads(out)
    chain = hc.load_chain(path)
    e = hc.end_point(chain, [0.3, 1.2, 2.0])
    assert np.allclose(data["results"]["endpoint"], e, atol=1e-12)
    assert data["results"]["squared_distance"] == pytest.approx(float(e @ e), abs=1e-12)


def test_cmd_fk_malformed_file(tmp_path, capsys):
    path = write(tmp_path, "bad.txt", PLANAR_3R.replace("endpoint 4 0", "endpoint 4"))
    assert main(["fk", path, "--theta", "0,0,0"]) == 2
    err = capsys.readouterr().err
    assert "endpoint" in err
    assert "line" in err


def test_cmd_fk_degenerate_hinge(tmp_path, capsys):
    path = write(tmp_path, "deg.txt", DEGENERATE)
    assert main(["fk", path, "--theta", "0"]) == 2
    assert "origin" in capsys.readouterr().err


def test_cmd_reach(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["reach", path]) == 0
    out = capsys.readouterr().out
    assert "max_distance: 4.0" in out
    assert "certified: True" in out


def test_cmd_reach_no_convergence_exit_code(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["reach", path, "--max-sweeps", "0"]) == 3
    assert "converge" in capsys.readouterr().err


def test_cmd_critical_and_determinism(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    argv = ["critical", path, "--starts", "200", "--seed", "7", "--format", "structured"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    data = json.loads(first)
    assert data["results"]["eulerian_bound"] == hc.eulerian_bound(3, 2)
    assert data["results"]["isolated_count"] >= 1


def test_cmd_critical_table_contains_census(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["critical", path, "--starts", "150", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "## census" in out
    assert "theta,value,grad_norm,index,class,params_a,max_residual" in out
    assert "global_max_certified" in out


def test_cmd_classify(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["classify", path, "--theta", "0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "class: global_max_certified" in out
    assert main(["classify", path, "--theta", "0.5,0.2,0.1"]) == 0
    out = capsys.readouterr().out
    assert "class: not_critical" in out


def test_cmd_panel_flat(tmp_path, capsys):
    path = write(tmp_path, "panel.txt", PANEL_3D)
    assert main(["panel", path, "flat"]) == 0
    out = capsys.readouterr().out
    assert "count: 4" in out


def test_cmd_panel_orbit_flat_singleton(tmp_path, capsys):
    path = write(tmp_path, "panel.txt", PANEL_3D)
    assert main(["panel", path, "orbit", "--theta", "0,0"]) == 0
    out = capsys.readouterr().out
    assert "cardinality: 1" in out


def test_cmd_panel_involution_twice_restores(tmp_path, capsys):
    path = write(tmp_path, "panel.txt", PANEL_3D)
    theta = [0.7, 1.9]
    assert (
        main(
            [
                "panel",
                path,
                "involution",
                "--theta",
                "0.7,1.9",
                "--anchor",
                "head",
                "--k",
                "1",
                "--format",
                "structured",
            ]
        )
        == 0
    )
    data = json.loads(capsys.readouterr().out)
    image = data["results"]["theta"]
    arg = ",".join(repr(v) for v in image)
    assert (
        main(
            ["panel", path, "involution", "--theta", arg, "--anchor", "head", "--k", "1", "--format", "structured"]
        )
        == 0
    )
    data2 = json.loads(capsys.readouterr().out)
    chain = hc.load_chain(path).chain
    assert hc.torus_distance(np.array(data2["results"]["theta"]), np.array(theta)) < 1e-6


def test_cmd_panel_flatten_option(tmp_path, capsys):
    # a folded (non-flat) panel chain flattens on load with --flatten
    from conftest import fold_chain_c1
    from hingechain.chainfile import format_chain

    path = write(tmp_path, "folded.txt", format_chain(fold_chain_c1()))
    assert main(["panel", path, "flat"]) == 2
    capsys.readouterr()
    assert main(["panel", path, "flat", "--flatten"]) == 0
    assert "count: 4" in capsys.readouterr().out


def test_cmd_panel_requires_panels(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["panel", path, "flat"]) == 2
    assert "panel" in capsys.readouterr().err


def test_cmd_bound(capsys):
    assert main(["bound", "3", "3"]) == 0
    out = capsys.readouterr().out
    assert "bound: 176" in out
    assert "eulerian_row: 1 4 1" in out


def test_reports_echo_tolerances(tmp_path, capsys):
    path = write(tmp_path, "chain.txt", PLANAR_3R)
    assert main(["fk", path, "--theta", "0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "# tol.incidence_rel:" in out
    assert "# tol.scale:" in out
