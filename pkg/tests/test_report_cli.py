import io
import json
import math
import re
import xml.etree.ElementTree as ET
from fractions import Fraction

import numpy as np
import pytest

from lenscs import LensSpace, build_fan, pq_web, triangulate
from lenscs.errors import ConvergenceError
from lenscs.exact import worker_count
from lenscs.largen import TooftData, saddle_solve
from lenscs.report import cli
from lenscs.report.envelope import ReportEnvelope, decode_complex, encode, error_object
from lenscs.report.render import (NONTRIVIAL_COLOR, TRIVIAL_COLOR, Element, SvgScene, render_density, render_fan,
                                  render_web, write_svg)

SVG_NS = "{http://www.w3.org/2000/svg}"
NUM = re.compile(r"-?\d+(?:\.\d+)?(?:e-?\d+)?")


def run(*argv):
    buf = io.StringIO()
    code, text = cli.run(list(argv), stdout=buf)
    return code, text


def svg_coordinates_inside(path):
    """Parse the SVG and check every drawn coordinate against the root viewBox."""
    root = ET.parse(path).getroot()
    assert root.tag == SVG_NS + "svg"
    x0, y0, w, h = (float(v) for v in root.attrib["viewBox"].split())
    defs = {id(e) for d in root.iter(SVG_NS + "defs") for e in d.iter()}
    clips = {id(e) for c in root.iter(SVG_NS + "clipPath") for e in c.iter()}
    n = 0
    for el in root.iter():
        if id(el) in defs or id(el) in clips:
            continue
        if el.tag == SVG_NS + "path" and "d" in el.attrib and "transform" not in el.attrib:
            nums = [float(v) for v in NUM.findall(el.attrib["d"])]
            for x, y in zip(nums[::2], nums[1::2]):
                assert x0 - 1e-6 <= x <= x0 + w + 1e-6 and y0 - 1e-6 <= y <= y0 + h + 1e-6
                n += 1
        if el.tag == SVG_NS + "use":
            x, y = float(el.attrib["x"]), float(el.attrib["y"])
            assert x0 <= x <= x0 + w and y0 <= y <= y0 + h
            n += 1
    return n


# ---------------------------------------------------------------------------
# envelope


def test_encode_types():
    obj = {"z": 1 + 2j, "a": np.arange(3), "f": np.float64(0.5), "r": Fraction(1, 3), "nan": float("nan"),
           "b": np.bool_(True), 3: (np.complex128(1j),)}
    e = encode(obj)
    assert e["z"] == {"re": 1.0, "im": 2.0}
    assert e["a"] == [0, 1, 2] and e["r"] == "1/3" and e["nan"] == "nan" and e["b"] is True
    assert e["3"] == [{"re": 0.0, "im": 1.0}]
    assert decode_complex(e)["z"] == 1 + 2j


def test_envelope_round_trip():
    env = ReportEnvelope("fan", {"p": 5}, {"v": 1j})
    back = ReportEnvelope.from_json(env.to_json())
    assert back.command == "fan" and back.outputs == {"v": {"re": 0.0, "im": 1.0}}
    err = json.loads(error_object(ValueError("boom"), 2))
    assert err["error"] == {"type": "ValueError", "message": "boom", "exit_code": 2}


# ---------------------------------------------------------------------------
# CLI


def test_fan_command(tmp_path):
    svg = tmp_path / "fan.svg"
    code, text = run("fan", "--p", "5", "--q", "2", "--svg", str(svg))
    assert code == 0
    out = json.loads(text)["outputs"]
    assert len(out["fan"]["points"]) == 8
    assert len(out["interior_points"]) == 4
    assert out["topology"]["b2"] == 5 and out["lattice_width"] == 3
    assert svg_coordinates_inside(svg) > 0


def test_claim1_command():
    code, text = run("claim1", "--p", "5", "--q", "2")
    assert code == 0 and json.loads(text)["outputs"]["verdict"] == "OBSTRUCTED"


def test_exact_z_rank_one():
    code, text = run("exact-z", "--p", "2", "--q", "1", "--N", "1", "--k", "3", "--m", "1")
    assert code == 0
    v = decode_complex(json.loads(text)["outputs"]["value"])
    # exp(-4 pi^2 q m^2/(g_s^2 p)) with g_s^2 = 4 pi i/(k+N)
    assert abs(v - complex(math.cos(2 * math.pi), math.sin(2 * math.pi))) < 1e-12


def test_exact_z_full_and_gs():
    code, text = run("exact-z", "--p", "3", "--q", "1", "--N", "2", "--k", "2", "--full", "--weighted")
    assert code == 0
    code, text = run("exact-z", "--p", "3", "--q", "1", "--N", "2", "--gs", "0.5", "--m", "1", "0")
    assert code == 0
    assert run("exact-z", "--p", "3", "--q", "1", "--N", "2")[0] == 2
    assert run("exact-z", "--p", "3", "--q", "1", "--N", "2", "--full")[0] == 2


def test_matrix_z_quadrature_matches_exact():
    code, text = run("matrix-z", "--p", "3", "--q", "2", "--N", "2", "--gs", "0.5", "--m", "1", "0")
    out = json.loads(text)["outputs"]
    code2, text2 = run("exact-z", "--p", "3", "--q", "2", "--N", "2", "--gs", "0.5", "--m", "1", "0")
    ref = decode_complex(json.loads(text2)["outputs"]["value"])
    assert code == code2 == 0
    assert abs(decode_complex(out["normalized_value"]) - ref) < 1e-9 * abs(ref)


def test_matrix_z_monte_carlo_seeded():
    args = ("matrix-z", "--p", "2", "--q", "1", "--N", "2", "--gs", "0.5", "--method", "mc",
            "--samples", "5000", "--seed", "4")
    assert run(*args)[1] == run(*args)[1]


def test_saddle_and_curve_commands(tmp_path):
    code, text = run("saddle", "--p", "3", "--q", "1", "--N", "30", "--t", "1", "--S0", "0.4",
                     "--svg", str(tmp_path / "d.svg"))
    assert code == 0
    out = json.loads(text)["outputs"]
    assert out["config"]["residual"] < 1e-10 and len(out["endpoints"]) == 3
    code, text = run("curve-q1", "--p", "2", "--t", "1", "--S0", "0.3")
    periods = json.loads(text)["outputs"]["a_periods"]
    assert code == 0 and periods == pytest.approx([0.3, 0.7], abs=1e-9)


def test_web_and_density_svg(tmp_path):
    assert run("web-svg", "--p", "5", "--q", "2", "--svg", str(tmp_path / "w.svg"))[0] == 0
    assert svg_coordinates_inside(tmp_path / "w.svg") > 0
    code, text = run("density-svg", "--p", "5", "--q", "2", "--N", "50", "--t", "1", "--svg", str(tmp_path / "d.svg"))
    assert code == 0
    assert svg_coordinates_inside(tmp_path / "d.svg") > 0


@pytest.mark.parametrize("argv,code", [
    (["fan", "--p", "4", "--q", "2"], 2),
    (["fan", "--p", "5"], 2),
    (["fan", "--p", "5", "--q", "2", "--bogus"], 2),
    (["nosuch"], 2),
    (["exact-z", "--p", "2", "--q", "1", "--N", "9", "--k", "3"], 4),
    (["matrix-z", "--p", "2", "--q", "1", "--N", "5", "--gs", "0.5"], 4),
    (["curve-q1", "--p", "3", "--t", "1", "--S0", "2"], 2),
])
def test_exit_codes(argv, code):
    c, text = run(*argv)
    assert c == code
    err = json.loads(text)["error"]
    assert err["exit_code"] == code and err["message"]


def test_numeric_failure_exit_code(monkeypatch):
    def boom(a):
        raise ConvergenceError("did not converge")
    monkeypatch.setattr(cli, "cmd_claim1", boom)
    # run() builds a fresh parser, which picks up the patched handler
    assert run("claim1", "--p", "5", "--q", "2")[0] == 3

    def crash(a):
        raise RuntimeError("unexpected")
    monkeypatch.setattr(cli, "cmd_claim1", crash)
    assert run("claim1", "--p", "5", "--q", "2")[0] == 3


def test_help_exits_zero(capsys):
    assert cli.run(["--help"])[0] == 0


def test_out_file_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["mirror", "--p", "5", "--q", "2"]
    assert run("--out", str(a), *args)[0] == 0
    assert run("--out", str(b), *args)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    env = json.loads(a.read_text())
    assert env["timings"] == {} and env["outputs"]["invariants"]["genus"] == 4


def test_timings_opt_in():
    code, text = run("--timings", "claim1", "--p", "3", "--q", "1")
    assert "total_ms" in json.loads(text)["timings"]


def test_main_returns_code(capsys):
    assert cli.main(["claim1", "--p", "3", "--q", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "claim1"


def test_thread_env(monkeypatch):
    monkeypatch.setenv("LENSCS_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("LENSCS_THREADS", "x")
    assert worker_count() == 1


# ---------------------------------------------------------------------------
# scenes


def test_render_fan_2_1():
    fan = build_fan(LensSpace(2, 1))
    tri = triangulate(fan)
    scene = render_fan(fan, tri)
    assert scene.count("point") == 5
    hull = [e for e in scene.elements if e.kind == "polygon"]
    assert len(hull) == 1 and len(hull[0].coords) == 4
    assert len(tri.simplices) == 4
    assert scene.count("segment") == len(tri.edges)
    # lattice diagrams use a fixed pixel scale
    x0, y0, w, h = scene.viewbox()
    assert scene.width == round(w * 60) and scene.height == round(h * 60)


def test_render_web_5_2():
    scene = render_web(pq_web(triangulate(build_fan(LensSpace(5, 2)))))
    assert scene.count("point") == 10
    assert scene.count("segment") == 13 + 4


def test_render_density_cylinder_layout():
    cfg = saddle_solve(LensSpace(5, 2), 50, 1.0)
    scene = render_density(cfg.groups, 5)
    cuts = [e for e in scene.elements if e.kind == "segment"]
    assert len(cuts) == 5
    for I, e in enumerate(cuts):
        assert e.coords[0][1] == pytest.approx(2 * math.pi * I / 5)
        assert e.style["color"] == (TRIVIAL_COLOR if I == 0 else NONTRIVIAL_COLOR)
    labels = [e.text for e in scene.elements if e.kind == "label"]
    assert labels == [f"I={I}" for I in range(5)]


def test_svg_bytes_repeat(tmp_path):
    scene = render_fan(build_fan(LensSpace(7, 3)), triangulate(build_fan(LensSpace(7, 3))))
    a = write_svg(scene, tmp_path / "a.svg").read_bytes()
    b = write_svg(scene, tmp_path / "b.svg").read_bytes()
    assert a == b
    ET.fromstring(a)


def test_scene_validation():
    bad = SvgScene(10, 10, [Element("point", [(float("nan"), 0.0)])])
    with pytest.raises(ValueError):
        bad.validate()
    empty = SvgScene(10, 10, [])
    assert empty.bounds() == (0.0, 0.0, 1.0, 1.0)
    assert "elements" in empty.to_dict()


def test_density_scene_with_complex_groups(tmp_path):
    cfg = saddle_solve(LensSpace(3, 1), 30, 1.0, TooftData.symmetric(3, 1.0, 0.5), kernel="complex")
    path = write_svg(render_density(cfg.groups, 3), tmp_path / "c.svg")
    assert svg_coordinates_inside(path) > 0
