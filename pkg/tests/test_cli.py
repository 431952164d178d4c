import json
import re
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from packlimit import certfile, fixtures
from packlimit.certfile import CertificateParseError, format_scalar, parse_scalar
from packlimit.cli import main
from packlimit.motions import RigidMotion, random_rotation
from packlimit.packers import pack_moser_rectangles
from packlimit.render import render_svg
from packlimit.shapes import Ball, Brick, Funnel, Homothet, Piece, PieceCollection
from packlimit.verify import ORIENTED, PackingCertificate

F = Fraction


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_fixture(tmp_path, name):
    d = tmp_path / name
    assert main(["fixture", name, str(d)]) == 0
    return sorted(str(p) for p in d.glob("*.json"))


# scalars and round trip ---------------------------------------------------------------


def test_scalar_format():
    assert format_scalar(F(2, 4)) == "1/2"
    assert format_scalar(F(-3)) == "-3/1"
    assert format_scalar(0.1) == "0.1"
    assert parse_scalar("-3/2", allow_float=False) == F(-3, 2)
    with pytest.raises(CertificateParseError):
        parse_scalar("2/4", allow_float=False)
    with pytest.raises(CertificateParseError):
        parse_scalar("1/0", allow_float=False)
    with pytest.raises(CertificateParseError):
        parse_scalar("0.5", allow_float=False)
    assert parse_scalar("0.5", allow_float=True) == 0.5
    assert parse_scalar("3/4", allow_float=False) == F(3, 4)


@given(st.fractions())
def test_exact_scalar_round_trip(v):
    assert parse_scalar(format_scalar(v), allow_float=False) == v


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_scalar_round_trip(v):
    assert parse_scalar(format_scalar(v), allow_float=True) == v


def _roundtrip(cert):
    text = certfile.dumps(cert)
    back = certfile.loads(text)
    assert back == cert
    assert certfile.dumps(back) == text


def test_round_trip_various():
    _roundtrip(fixtures.tiling_2x2())
    _roundtrip(fixtures.reflected_square())
    _roundtrip(pack_moser_rectangles(30, F(21, 20)))
    for cert in fixtures.homothet_sequence(count=5):
        _roundtrip(cert)
    for cert in fixtures.funnel_sequence(count=3):
        _roundtrip(cert)
    coll = PieceCollection.custom([Piece(1, (0.5, 0.25, 1.0))])
    rng = np.random.default_rng(0)
    sigma = RigidMotion.from_float(random_rotation(3, rng), [0.1, 0.2, 0.3])
    _roundtrip(PackingCertificate(coll, ((1, sigma),), Homothet(Ball(2.5, 3), 1.5), ORIENTED))
    _roundtrip(PackingCertificate(coll, ((1, sigma),), Brick((1.0, 2.0, 3.0))))


def test_strict_schema_rejects_unknown_and_missing_fields():
    obj = json.loads(certfile.dumps(fixtures.tiling_2x2()))
    obj["extra"] = 1
    with pytest.raises(CertificateParseError):
        certfile.loads(json.dumps(obj))
    obj = json.loads(certfile.dumps(fixtures.tiling_2x2()))
    del obj["mode"]
    with pytest.raises(CertificateParseError):
        certfile.loads(json.dumps(obj))
    obj = json.loads(certfile.dumps(fixtures.tiling_2x2()))
    obj["placements"][0]["colour"] = "red"
    with pytest.raises(CertificateParseError):
        certfile.loads(json.dumps(obj))
    obj = json.loads(certfile.dumps(fixtures.tiling_2x2()))
    obj["format_version"] = 2
    with pytest.raises(CertificateParseError):
        certfile.loads(json.dumps(obj))


def test_rejects_non_reduced_fraction_and_bad_json():
    text = certfile.dumps(fixtures.tiling_2x2()).replace('"1/1"', '"2/2"', 1)
    with pytest.raises(CertificateParseError):
        certfile.loads(text)
    with pytest.raises(CertificateParseError):
        certfile.loads("{not json")


def test_exact_file_rejects_non_permutation_theta():
    obj = json.loads(certfile.dumps(fixtures.tiling_2x2()))
    obj["placements"][0]["theta"] = ["3/5", "-4/5", "4/5", "3/5"]
    with pytest.raises(CertificateParseError):
        certfile.loads(json.dumps(obj))


# exit codes --------------------------------------------------------------------------------


def test_pack_and_verify(tmp_path, capsys):
    out = tmp_path / "r1.json"
    code, text, _ = run(capsys, "pack", "rectangles", 1, 1, "-o", out)
    assert code == 0 and "coverage=1/2" in text
    assert len(certfile.load(out).placements) == 1
    code, text, _ = run(capsys, "verify", out)
    assert code == 0 and text.startswith("valid coverage=1/2")


def test_pack_squares_decimal_width(tmp_path, capsys):
    out = tmp_path / "sq.json"
    code, text, _ = run(capsys, "pack", "squares", 50, "0.65", "-o", out)
    assert code == 0 and "coverage=" in text
    assert certfile.load(out).target == Brick((F(13, 20), F(1)))


def test_pack_usage_errors(tmp_path, capsys):
    assert run(capsys, "pack", "rectangles", 0, 1, "-o", tmp_path / "x.json")[0] == 64
    assert run(capsys, "pack", "triangles", 3, 1, "-o", tmp_path / "x.json")[0] == 64
    assert run(capsys, "pack", "rectangles", 3, "abc", "-o", tmp_path / "x.json")[0] == 64
    assert run(capsys)[0] == 64


def test_pack_capacity_failure(tmp_path, capsys):
    code, text, _ = run(capsys, "pack", "squares", 50, "1/2", "-o", tmp_path / "x.json")
    assert code == 1 and "capacity failure at piece" in text
    assert not (tmp_path / "x.json").exists()


def test_verify_fixtures(tmp_path, capsys):
    [tiling] = write_fixture(tmp_path, "tiling")
    [overlap] = write_fixture(tmp_path, "overlap")
    [refl] = write_fixture(tmp_path, "reflection")
    capsys.readouterr()
    code, text, _ = run(capsys, "verify", tiling)
    assert code == 0 and text.splitlines()[0] == "valid coverage=1"
    code, text, _ = run(capsys, "verify", overlap)
    assert code == 1 and any(line.startswith("overlap 1 2 ") for line in text.splitlines())
    assert run(capsys, "verify", refl)[0] == 0
    code, text, _ = run(capsys, "verify", refl, "--mode-override", "oriented")
    assert code == 1 and any(line.startswith("mode 1 ") for line in text.splitlines())


def test_verify_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": 1}', encoding="utf-8")
    assert run(capsys, "verify", bad)[0] == 65
    assert run(capsys, "verify", tmp_path / "missing.json")[0] == 65


def test_limit_homothet(tmp_path, capsys):
    paths = write_fixture(tmp_path, "homothet-float")
    out = tmp_path / "limit.json"
    code, text, _ = run(capsys, "limit", *paths, "-o", out)
    assert code == 0 and "valid coverage=1" in text
    assert certfile.load(out) == fixtures.tiling_2x2()
    report = json.loads((tmp_path / "limit.json.report.json").read_text())
    assert float(report["cluster_diameter"]) <= 1e-6


def test_limit_funnel_diverges(tmp_path, capsys):
    paths = write_fixture(tmp_path, "funnel")
    code, text, _ = run(capsys, "limit", *paths, "-o", tmp_path / "limit.json")
    assert code == 2 and "divergence" in text


def test_limit_mixed_inputs(tmp_path, capsys):
    packs = []
    for n in (5, 6, 7):
        packs.append(tmp_path / f"r{n}.json")
        run(capsys, "pack", "rectangles", n, 1, "-o", packs[-1])
    code, _, err = run(capsys, "limit", *packs, "-o", tmp_path / "limit.json")
    assert code == 64 and "usage error" in err
    paths = write_fixture(tmp_path, "homothet-exact")[:3]
    assert run(capsys, "limit", *paths, packs[0], "-o", tmp_path / "limit.json")[0] == 64


# render and brick-limit ---------------------------------------------------------------------


def test_render_tiling(tmp_path, capsys):
    [tiling] = write_fixture(tmp_path, "tiling")
    svg = tmp_path / "t.svg"
    assert run(capsys, "render", tiling, "-o", svg)[0] == 0
    text = svg.read_text()
    assert len(re.findall(r'<rect class="piece"', text)) == 4
    assert text.count("<text") == 4
    assert run(capsys, "render", tiling, "-o", tmp_path / "u.svg")[0] == 0
    assert (tmp_path / "u.svg").read_text() == text


def test_render_moser_hundred():
    svg = render_svg(pack_moser_rectangles(100, F(21, 20)))
    assert len(re.findall(r'<rect class="piece"', svg)) == 100


def test_render_rotated_and_funnel():
    coll = PieceCollection.custom([Piece(1, (1.0, 0.5))])
    sigma = RigidMotion.from_float([[0.6, -0.8], [0.8, 0.6]], [1.0, 1.0])
    svg = render_svg(PackingCertificate(coll, ((1, sigma),), Brick((3.0, 3.0))))
    assert '<polygon class="piece"' in svg
    svg = render_svg(fixtures.funnel_sequence(count=2)[1])
    assert '<polyline class="target"' in svg


def test_render_rejects_3d(tmp_path, capsys):
    coll = PieceCollection.custom([Piece(1, (F(1), F(1), F(1)))])
    cert = PackingCertificate(coll, ((1, RigidMotion.identity(3)),), Brick((F(1), F(1), F(1))))
    path = tmp_path / "c.json"
    certfile.save(cert, path)
    assert run(capsys, "render", path, "-o", tmp_path / "c.svg")[0] == 64
    with pytest.raises(ValueError):
        render_svg(cert)


def test_brick_limit_csv(tmp_path, capsys):
    csv = tmp_path / "b.csv"
    csv.write_text("\n".join(f"{1 + F(1, j)},2" for j in range(1, 201)) + "\n", encoding="utf-8")
    code, text, _ = run(capsys, "brick-limit", csv, "--window", 50)
    assert code == 0 and text.startswith("V=201/100 b=(152/151, 2) window=50")
    const = tmp_path / "c.csv"
    const.write_text("# constant\n2,3\n2,3\n2,3\n", encoding="utf-8")
    assert run(capsys, "brick-limit", const, "--window", 2)[1].startswith("V=6 b=(2, 3)")
    alt = tmp_path / "a.csv"
    alt.write_text("1,2\n2,1\n" * 5, encoding="utf-8")
    assert "note=product(b)>V" in run(capsys, "brick-limit", alt, "--window", 4)[1]


def test_brick_limit_bad_csv(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n", encoding="utf-8")
    assert run(capsys, "brick-limit", bad)[0] == 65
    bad.write_text("1,x\n", encoding="utf-8")
    assert run(capsys, "brick-limit", bad)[0] == 65


def test_shrink_command(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, text, _ = run(capsys, "shrink", "squares", 2, "1/2", 1, "-o", out)
    assert code == 0 and text.startswith("param=1/2 ")
    assert out.exists()
    assert run(capsys, "shrink", "squares", 50, "1/2", "11/20")[0] == 1


def test_funnel_target_round_trip_keeps_type():
    cert = fixtures.funnel_sequence(count=1)[0]
    assert isinstance(certfile.loads(certfile.dumps(cert)).target.base, Funnel)
