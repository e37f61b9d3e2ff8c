import json
import subprocess
import sys

import pytest

from apdnoise import DeviceSpec, device_enf
from apdnoise.cli import device_from_json, device_to_json, main


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse reports its own parse failures
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------------------
# enf

def test_enf_steps_text(capsys):
    code, out, _ = run_cli(capsys, "enf", "--steps", "0.3,0.3,0.3")
    assert code == 0
    assert "total_enf" in out and "1.42102" in out
    assert out.count("1.12426") == 3


def test_enf_ideal_steps(capsys):
    code, out, _ = run_cli(capsys, "enf", "--steps", "1,1,1,1")
    assert code == 0
    lines = dict(line.split(None, 1) for line in out.strip().splitlines())
    assert lines["total_enf"].strip() == "1"
    assert lines["mean_gain"].strip() == "16"


def test_enf_layers_json_matches_library(capsys):
    code, out, _ = run_cli(capsys, "enf", "--layer", "0.2,0.1", "--layer", "0.5",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    report = device_enf(DeviceSpec.from_probs([[0.2, 0.1], [0.5]]))
    assert payload["total_enf"] == report.total_enf
    assert payload["per_layer_enf"] == list(report.per_layer_enf)
    assert payload["mean_gain"] == report.moments.mean
    assert payload["total_enf"] == pytest.approx(1.360544217687075, abs=1e-12)


def test_enf_spec_file_and_m0_override(capsys, tmp_path):
    path = tmp_path / "device.json"
    path.write_text(json.dumps({"m0": 1.0, "layers": [[0.2, 0.1], [0.5]]}))
    code, from_file, _ = run_cli(capsys, "enf", "--spec", str(path),
                                 "--format", "json")
    assert code == 0
    code, inline, _ = run_cli(capsys, "enf", "--layer", "0.2,0.1", "--layer", "0.5",
                              "--format", "json")
    assert code == 0
    assert json.loads(from_file) == json.loads(inline)

    code, scaled, _ = run_cli(capsys, "enf", "--spec", str(path), "--m0", "2.0",
                              "--format", "json")
    assert code == 0
    assert json.loads(scaled)["mean_gain"] == 2.0 * json.loads(inline)["mean_gain"]
    assert json.loads(scaled)["total_enf"] == json.loads(inline)["total_enf"]


def test_enf_current_adds_spectral_intensity(capsys):
    code, out, _ = run_cli(capsys, "enf", "--steps", "0.3,0.3", "--current", "1e-6",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    q = 1.602176634e-19
    assert payload["spectral_intensity"] == pytest.approx(
        2.0 * q * payload["mean_square_gain"] * 1e-6, rel=1e-12)


def test_precision_flag(capsys):
    code, out, _ = run_cli(capsys, "enf", "--steps", "0.3,0.3,0.3",
                           "--precision", "12")
    assert code == 0
    assert f"{1.4210216314753692:.12g}" in out


def test_device_json_round_trip():
    device = DeviceSpec.from_probs(
        [[0.12345678901234567, 0.07], [0.3], [0.1, 0.2, 0.05]], m0=1.7)
    restored = device_from_json(json.loads(json.dumps(device_to_json(device))))
    assert restored == device
    assert device_enf(restored) == device_enf(device)


# ---------------------------------------------------------------------------
# exit codes

@pytest.mark.parametrize("argv", [
    ("enf", "--steps", "0.3,abc"),
    ("enf",),                                        # no device source
    ("enf", "--steps", "0.3", "--layer", "0.5"),     # mutually exclusive
    ("enf", "--steps", "0.3", "--precision", "0"),
    ("sweep", "--variable", "p", "--n", "abc"),
    ("sweep", "--variable", "n"),                    # missing --p
    ("cascade", "--network", "/nonexistent/net.json"),
])
def test_parse_errors_exit_2(capsys, argv):
    code, _, _ = run_cli(capsys, *argv)
    assert code == 2


@pytest.mark.parametrize("argv", [
    ("enf", "--steps", "1.5"),
    ("enf", "--layer", "0.7,0.5"),                   # spectrum mass above 1
    ("enf", "--steps", "0.3", "--m0", "-2"),
    ("enf", "--steps", "0.3", "--current", "-1"),
    ("mc", "--steps", "0.3", "--trials", "0"),
    ("sweep", "--variable", "p", "--points", "1"),
    ("sweep", "--variable", "p", "--from", "-0.5", "--to", "0.5"),
    ("sweep", "--variable", "p", "--n", "0"),
])
def test_domain_violations_exit_3(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 3
    assert err.startswith("error:")


def test_spec_file_errors(capsys, tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert run_cli(capsys, "enf", "--spec", str(bad_json))[0] == 2

    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(json.dumps({"layers": [[0.5]], "gain": 2}))
    assert run_cli(capsys, "enf", "--spec", str(unknown_key))[0] == 2

    invalid_device = tmp_path / "invalid.json"
    invalid_device.write_text(json.dumps({"layers": [[1.5]]}))
    assert run_cli(capsys, "enf", "--spec", str(invalid_device))[0] == 3


# ---------------------------------------------------------------------------
# sweep

def parse_csv(out):
    lines = out.strip().splitlines()
    rows = []
    for line in lines[1:]:
        p, n, gain, enf = line.split(",")
        rows.append((float(p), int(n), float(gain), float(enf)))
    return lines[0], rows


def test_sweep_csv_header_and_boundary_n(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "n", "--p", "0",
                           "--from", "1", "--to", "10")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == "p,n,mean_gain,total_enf"
    assert [n for _, n, _, _ in rows] == list(range(1, 11))
    assert all(enf == 1.0 and gain == 1.0 for _, _, gain, enf in rows)


def test_sweep_ideal_n_curve(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "n", "--p", "1",
                           "--from", "1", "--to", "10")
    assert code == 0
    _, rows = parse_csv(out)
    assert all(gain == 2.0 ** n for _, n, gain, _ in rows)
    assert all(enf == 1.0 for _, _, _, enf in rows)


def test_sweep_p_grid_hits_the_peak(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "p", "--n", "1",
                           "--from", "0", "--to", "1", "--points", "4")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 4
    assert rows[0] == (0.0, 1, 1.0, 1.0)
    assert rows[-1] == (1.0, 1, 2.0, 1.0)
    assert rows[1][3] == pytest.approx(1.125, abs=1e-12)  # p = 1/3 row


def test_sweep_family_orders_curves(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "p", "--n", "1..3",
                           "--points", "3")
    assert code == 0
    _, rows = parse_csv(out)
    assert [n for _, n, _, _ in rows] == [1, 1, 1, 2, 2, 2, 3, 3, 3]


def test_sweep_gain_variable(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "gain", "--n", "3",
                           "--from", "1", "--to", "8", "--points", "8")
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0][0] == 0.0 and rows[0][2] == 1.0
    assert rows[-1][0] == 1.0 and rows[-1][2] == 8.0


def test_sweep_json_format(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "p", "--n", "2",
                           "--points", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 5
    assert set(rows[0]) == {"p", "n", "mean_gain", "total_enf"}
    assert rows[-1] == {"p": 1.0, "n": 2, "mean_gain": 4.0, "total_enf": 1.0}


def test_sweep_csv_uses_17_significant_digits(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--variable", "p", "--n", "1",
                           "--points", "4")
    assert code == 0
    third = out.strip().splitlines()[2].split(",")
    assert third[0] == f"{1.0 / 3.0:.17g}"


# ---------------------------------------------------------------------------
# validate

def test_validate_default_runs_all_checks(capsys):
    code, out, _ = run_cli(capsys, "validate", "--devices", "50")
    assert code == 0
    assert "measured-gain check: PASS" in out
    assert out.count("illustration") == 3
    assert "oracle equivalence: PASS" in out
    assert "FAIL" not in out


def test_validate_illustrations_only(capsys):
    code, out, _ = run_cli(capsys, "validate", "--illustrations")
    assert code == 0
    assert out.count("PASS") == 3
    assert "oracle" not in out and "measured" not in out


def test_validate_oracle_reports_seed_and_count(capsys):
    code, out, _ = run_cli(capsys, "validate", "--oracle", "--devices", "25",
                           "--seed", "7")
    assert code == 0
    assert "agreements=25/25" in out
    assert "seed=7" in out


# ---------------------------------------------------------------------------
# mc

def test_mc_deterministic_device(capsys):
    code, out, _ = run_cli(capsys, "mc", "--steps", "1,1", "--trials", "10",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["enf_estimate"] == 1.0
    assert payload["std_error_enf"] == 0.0
    assert payload["mean_gain"] == 4.0


def test_mc_reports_reference_values(capsys):
    code, out, _ = run_cli(capsys, "mc", "--steps", "0.3,0.3,0.3",
                           "--trials", "20000", "--seed", "1")
    assert code == 0
    assert "reference_enf" in out and "1.42102" in out


def test_mc_estimate_near_reference(capsys):
    code, out, _ = run_cli(capsys, "mc", "--layer", "0.2,0.1", "--trials", "100000",
                           "--seed", "2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["mean_gain"] - 1.4) <= 3.0 * payload["std_error_mean"]


# ---------------------------------------------------------------------------
# cascade

def write_network(tmp_path, obj):
    path = tmp_path / "network.json"
    path.write_text(json.dumps(obj))
    return str(path)


def test_cascade_single_stage(capsys, tmp_path):
    path = write_network(tmp_path, {
        "input_noise": 1.0,
        "stages": [{"power_gain": 2.0, "internal_noise": 0.5}],
    })
    code, out, _ = run_cli(capsys, "cascade", "--network", path, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["stage_factors"] == [1.25]
    assert payload["bangera_total"] == 1.25
    assert payload["friis_total"] == 1.25
    assert payload["difference"] == 0.0


def test_cascade_two_stage_text(capsys, tmp_path):
    path = write_network(tmp_path, {
        "input_noise": 1.0,
        "stages": [{"power_gain": 2.0, "internal_noise": 0.5},
                   {"power_gain": 2.0, "internal_noise": 0.5}],
    })
    code, out, _ = run_cli(capsys, "cascade", "--network", path)
    assert code == 0
    lines = dict(line.rsplit(None, 1) for line in out.strip().splitlines())
    assert lines["bangera_total"] == "1.375"
    assert lines["friis_total"] == "1.3"
    assert lines["difference"] == "0.075"


def test_cascade_noiseless_network(capsys, tmp_path):
    path = write_network(tmp_path, {
        "input_noise": 2.0,
        "stages": [{"power_gain": g} for g in (2.0, 3.0, 5.0)],
    })
    code, out, _ = run_cli(capsys, "cascade", "--network", path, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["stage_factors"] == [1.0, 1.0, 1.0]
    assert payload["bangera_total"] == 1.0


def test_cascade_error_codes(capsys, tmp_path):
    negative = write_network(tmp_path, {
        "input_noise": 1.0,
        "stages": [{"power_gain": 2.0, "internal_noise": -0.5}],
    })
    assert run_cli(capsys, "cascade", "--network", negative)[0] == 3

    unknown = write_network(tmp_path, {
        "input_noise": 1.0,
        "stages": [{"power_gain": 2.0, "noise": 0.5}],
    })
    assert run_cli(capsys, "cascade", "--network", unknown)[0] == 2


# ---------------------------------------------------------------------------
# black box

def run_module(*argv):
    return subprocess.run([sys.executable, "-m", "apdnoise", *argv],
                          capture_output=True, text=True)


def test_module_entry_point_exit_codes():
    assert run_module("enf", "--steps", "0.3").returncode == 0
    assert run_module("enf", "--steps", "2").returncode == 3
    assert run_module("nonsense").returncode == 2
    result = run_module("enf", "--steps", "0.3,0.3,0.3")
    assert "1.42102" in result.stdout
