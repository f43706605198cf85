"""Command-line behaviour: transcript-style output, exit codes, JSON
round-trips, file-sourced complexes, determinism."""

import json

import pytest

from spectra import cli
from spectra.chains import ChainComplex, Combination, Generator
from spectra.spectral import FilteredComplex, make_filtered, page_group


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- text transcripts --------------------------------------------------------


def test_group_hopf(capsys):
    code, out, _ = run(capsys, "group", "hopf", "2", "0", "1")
    assert code == 0
    assert out == "Spectral sequence E^2_{0,1}\nComponent Z\n"


def test_group_s2kz2(capsys):
    code, out, _ = run(capsys, "group", "s2-kz2", "2", "0", "1")
    assert code == 0
    assert out == "Spectral sequence E^2_{0,1}\nComponent Z/2Z\n"


def test_group_empty_prints_nil(capsys):
    code, out, _ = run(capsys, "group", "hopf", "3", "0", "1")
    assert code == 0
    assert "NIL" in out


def test_bd_divisors_line(capsys):
    code, out, _ = run(capsys, "bd", "s2-kz2", "2", "0", "1")
    assert code == 0
    assert "divisors: (2)" in out
    assert "<CrPr 0 * - 1>" in out


def test_bd_s2kz2_2_2_0(capsys):
    code, out, _ = run(capsys, "bd", "s2-kz2", "2", "2", "0")
    assert code == 0
    assert "divisors: (1 1 1 1 0)" in out
    assert out.count("{CMBN 2}") == 5


def test_bd_hopf_2_2_0(capsys):
    code, out, _ = run(capsys, "bd", "hopf", "2", "2", "0")
    assert code == 0
    assert out.count("{CMBN 2}") == 1
    assert "divisors: (0)" in out
    assert "S2" in out or "s2" in out


def test_dffr(capsys):
    for source in ("hopf", "s2-kz2"):
        code, out, _ = run(capsys, "dffr", source, "2", "2", "0", "1")
        assert code == 0
        assert out.strip() == "(1)"
    code, out, _ = run(capsys, "dffr", "s2-kz2", "2", "2", "0", "0")
    assert out.strip() == "(0)"


def test_cnvg(capsys):
    for source, n, level in (
        ("hopf", 0, 1),
        ("hopf", 1, 3),
        ("s2-kz2", 1, 3),
        ("s2-kz2", 2, 1),
        ("s2-kz2", 3, 1),
    ):
        code, out, _ = run(capsys, "cnvg", source, str(n))
        assert code == 0
        assert out.strip() == str(level), (source, n)


def test_sweep_hopf_degree3(capsys):
    code, out, _ = run(capsys, "sweep", "hopf", "3", "3")
    assert code == 0
    blocks = out.strip().split("Spectral sequence ")
    assert "E^3_{2,1}\nComponent Z" in out
    assert out.count("Component") == 1


def test_sweep_s2kz2_degree1(capsys):
    code, out, _ = run(capsys, "sweep", "s2-kz2", "1", "3")
    assert code == 0
    assert "E^3_{0,1}" in out and "E^3_{1,0}" in out
    assert out.count("Component") == 0  # both vanish at r=3


def test_sweep_s2kz2_degree0(capsys):
    code, out, _ = run(capsys, "sweep", "s2-kz2", "0", "1")
    assert code == 0
    assert "E^1_{0,0}\nComponent Z" in out


def test_list_scenarios(capsys):
    code, out, _ = run(capsys, "list-scenarios")
    assert code == 0
    for name in ("hopf", "p3r", "s2-kz2"):
        assert name in out


def test_text_output_is_deterministic(capsys):
    _, out1, _ = run(capsys, "bd", "s2-kz2", "2", "2", "0")
    _, out2, _ = run(capsys, "bd", "s2-kz2", "2", "2", "0")
    assert out1 == out2


# -- json ---------------------------------------------------------------------


def test_group_json_roundtrip(capsys):
    code, out, _ = run(capsys, "group", "s2-kz2", "2", "0", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["r"] == 2 and doc["p"] == 0 and doc["q"] == 1
    assert doc["components"] == ["Z/2Z"]
    assert doc["divisors"] == [2]
    assert len(doc["numerator"]) == 1


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "hopf", "3", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert isinstance(doc, list)
    assert [d["components"] for d in doc if d["p"] == 2] == [["Z"]]


def test_cnvg_json(capsys):
    code, out, _ = run(capsys, "cnvg", "hopf", "1", "--format", "json")
    assert json.loads(out) == {"degree": 1, "level": 3}


# -- exit codes -----------------------------------------------------------------


def test_unknown_scenario_exit_2(capsys):
    code, _, err = run(capsys, "group", "florp", "2", "0", "1")
    assert code == 2
    assert "unknown scenario" in err


def test_malformed_file_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "group", str(bad), "2", "0", "1")[0] == 3

    dd = tmp_path / "dd.json"
    dd.write_text(
        json.dumps(
            {
                "degrees": {"0": ["a"], "1": ["b"], "2": ["c"]},
                "differential": {"2:c": [[1, "b"]], "1:b": [[1, "a"]]},
                "filtration": {"a": 0, "b": 0, "c": 0},
            }
        )
    )
    code, _, err = run(capsys, "group", str(dd), "1", "0", "0")
    assert code == 3 and "d*d" in err

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"degrees": {"0": ["a"]}, "filtration": {}}))
    assert run(capsys, "group", str(missing), "1", "0", "0")[0] == 3


def test_arity_mismatch_exit_5(capsys):
    code, _, err = run(capsys, "dffr", "s2-kz2", "2", "2", "0", "1", "0")
    assert code == 5


def test_unguaranteed_page_exit_4(monkeypatch, capsys):
    from spectra.effective import FilteredEquivalence
    from spectra.scenarios import build_scenario

    feq = build_scenario("hopf").equivalence
    left = FilteredComplex(
        feq.left_filtered.complex, feq.left_filtered._flin,
        origin="synthetic", bounds=lambda n: (-1, n),
    )
    right = FilteredComplex(
        feq.right_filtered.complex, feq.right_filtered._flin, origin="synthetic-right"
    )
    FilteredEquivalence(feq.equivalence, left, right, order=2)
    monkeypatch.setattr(cli, "resolve_source", lambda s: left)
    assert run(capsys, "group", "x", "2", "0", "1")[0] == 4
    code, out, _ = run(capsys, "group", "x", "2", "0", "1", "--force")
    assert code == 0 and "Component Z" in out
    assert run(capsys, "group", "x", "3", "0", "1")[0] == 0


# -- file-sourced complexes --------------------------------------------------------


HOPF_SMALL = {
    "degrees": {"0": ["pt"], "1": ["c1"], "2": ["c2"], "3": ["c3"]},
    "differential": {"2:c2": [[1, "c1"]]},
    "filtration": {"pt": 0, "c1": 0, "c2": 2, "c3": 2},
}


def test_file_source_matches_programmatic(tmp_path, capsys):
    f = tmp_path / "hopf_small.json"
    f.write_text(json.dumps(HOPF_SMALL))
    code, out, _ = run(capsys, "group", str(f), "2", "2", "0")
    assert code == 0 and "Component Z" in out
    code, out, _ = run(capsys, "dffr", str(f), "2", "2", "0", "1")
    assert out.strip() == "(1)"
    code, out, _ = run(capsys, "cnvg", str(f), "1")
    assert out.strip() == "3"

    # the same complex built programmatically gives identical pages
    gens = {n: [Generator(n, name) for name in names] for n, names in
            ((0, ["pt"]), (1, ["c1"]), (2, ["c2"]), (3, ["c3"]))}
    flt = {"pt": 0, "c1": 0, "c2": 2, "c3": 2}

    def diff(g):
        if g.key == "c2":
            return Combination.single(Generator(1, "c1"))
        return Combination.zero(g.degree - 1)

    prog = make_filtered(
        ChainComplex(lambda n: gens.get(n, []), diff, origin="prog"),
        lambda n, g: flt[g.key],
        check_degrees=range(0, 4),
    )
    filecx = cli.load_filtered_complex_file(str(f))
    for r in (1, 2, 3):
        for n in range(3):
            for p in range(0, n + 1):
                a = page_group(prog, r, p, n - p).presentation.invariant_factors
                b = page_group(filecx, r, p, n - p).presentation.invariant_factors
                assert a == b


def test_validate_command_effective(capsys):
    code, out, _ = run(capsys, "validate", "s2-kz2")
    assert code == 0
    assert "d*d = 0" in out


def test_validate_command_hopf(capsys):
    code, out, _ = run(capsys, "validate", "hopf", "--samples", "40")
    assert code == 0
    assert "left reduction ok" in out and "right reduction ok" in out


def test_validate_command_file(tmp_path, capsys):
    f = tmp_path / "small.json"
    f.write_text(json.dumps(HOPF_SMALL))
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 0 and "checks passed" in out


def test_seed_env_var_sets_default(monkeypatch):
    monkeypatch.setenv("SPECTRA_SEED", "17")
    parser = cli.build_parser()
    args = parser.parse_args(["validate", "s2-kz2"])
    assert args.seed == 17


def test_byte_stable_across_processes():
    import subprocess
    import sys

    cmd = [sys.executable, "-m", "spectra.cli", "bd", "s2-kz2", "2", "2", "0"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
