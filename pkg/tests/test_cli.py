"""Command-line surface: reports, exit codes, determinism."""

import json

from nullag.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


def test_derive_linear_family(capsys):
    code, report, _ = run_json(
        capsys, "derive", "--B", "f1(t)*x + f2(t)*t + f3(t)", "--f", "f4(t)"
    )
    assert code == 0
    assert report["C"] == "f2(t) + f3(t)' + 1/2*x*f1(t)' + t*f2(t)'"
    assert report["nullity"] == "ProvenNull"
    assert report["version"]
    assert report["seed"] == 0


def test_derive_trivial_constant(capsys):
    code, report, _ = run_json(capsys, "derive", "--B", "1")
    assert code == 0
    assert report["lagrangian"] == "x'"


def test_derive_quadratic_damping_pair(capsys):
    code, report, _ = run_json(capsys, "derive", "--B", "B0*exp(a0*x)")
    assert code == 0
    assert report["C"] == "0"
    assert report["lagrangian"] == "x'*B0*exp(x*a0)"


def test_derive_batch_spec_file(capsys, tmp_path):
    records = [
        {"kind": "generating", "B": "f1(t)*x + f2(t)*t + f3(t)", "f": "f4(t)"},
        {
            "kind": "fraction",
            "f1": "a1",
            "f2": "a2",
            "f3": "0",
            "f4": "a4",
            "domain": {"x": [0.5, 2.0], "t": [0.5, 2.0]},
            "guards": [{"expr": "a2*x + a4", "positive": True}],
        },
    ]
    spec = tmp_path / "corpus.json"
    spec.write_text(json.dumps(records))
    code, report, _ = run_json(capsys, "derive", "--spec-file", str(spec))
    assert code == 0
    assert len(report["results"]) == 2
    assert report["results"][1]["lagrangian"] == "x'*a1/(a4 + x*a2)"
    assert report["results"][1]["gauge"] != "not reconstructed"


def test_verify_null_fraction(capsys):
    code, report, _ = run_json(
        capsys, "verify", "a1*x'/(a2*x + a4)", "--guard", "+a2*x + a4"
    )
    assert code == 0
    assert report["verdict"] == "ProvenNull"


def test_verify_kinetic_energy_fails_with_witness(capsys):
    code, report, _ = run_json(capsys, "verify", "1/2*x'^2")
    assert code == 2
    assert report["verdict"] == "NotNull"
    assert report["equivalence"]["witness"] is not None


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "verify", "x' +")
    assert code == 3
    assert "input error" in err


def test_harmonic_command(capsys):
    code, report, _ = run_json(
        capsys, "harmonic", "--B", "f1(t)*x + f2(t)*t + f3(t)", "--f", "f4(t)", "--n", "1"
    )
    assert code == 0
    assert report["harmonic"]["order"] == 1
    assert report["nullity"] == "ProvenNull"


def test_eom_from_lagrangian(capsys):
    code, report, _ = run_json(capsys, "eom", "--L", "1/2*x'^2*exp(2*a0*x)")
    assert code == 0
    assert report["eom"]["provenance"] == "euler-lagrange"
    assert report["eom"]["explicit"] == "x'' = -a0*x'^2"


def test_eom_from_pair_with_composition(capsys):
    code, report, _ = run_json(
        capsys, "eom", "--B", "B0*exp(a0*x)", "--compose", "reciprocal"
    )
    assert code == 0
    assert report["eom"]["provenance"] == "composition"
    assert report["eom"]["explicit"] == "x'' = -a0*x'^2"
    assert report["permissible"] in ("ok", "conditional")


def test_system_constant_tied(capsys):
    code, report, _ = run_json(
        capsys, "system", "constant", "--alpha", "0", "--beta", "2", "--gamma", "1"
    )
    assert code == 0
    system = report["system"]
    assert system["classification"] == "DampedOscillatorTied"
    assert system["eom"]["explicit"] == "x'' = -2*x' - x"


def test_system_constant_harmonic_oscillator_witness(capsys):
    code, report, _ = run_json(
        capsys, "system", "constant", "--alpha", "0", "--beta", "0", "--gamma", "1"
    )
    assert code == 0
    system = report["system"]
    assert system["classification"] == "NoNullLagrangian"
    assert system["absent_witness"] is not None


def test_system_timedep(capsys):
    code, report, _ = run_json(
        capsys, "system", "timedep", "--beta1", "2/t", "--gamma1", "0",
        "--t-box", "1,3",
    )
    assert code == 0
    assert report["system"]["classification"] == "TimeDependentOscillator"
    assert report["system"]["B"] == "t*B0"


def test_system_displacement(capsys):
    code, report, _ = run_json(
        capsys, "system", "displacement", "--alpha2", "1/x", "--beta0", "2",
        "--ctilde", "0",
    )
    assert code == 0
    assert report["system"]["classification"] == "DisplacementDependent"
    assert report["system"]["eom"]["explicit"] == "x'' = -2*x' - x'^2/x - 1/2*x"


def test_simulate_quadratic_damping(capsys, tmp_path):
    csv_path = tmp_path / "traj.csv"
    code, report, _ = run_json(
        capsys,
        "simulate", "--system", "quadratic", "--a0", "1",
        "--ic", "0,0,2", "--h", "1e-3", "--t1", "1", "--csv", str(csv_path),
    )
    assert code == 0
    assert abs(report["final_state"]["x"] - 1.0986122886681098) < 1e-8
    assert report["drift"]["passed"]
    assert report["drift"]["max_abs_drift"] <= 1e-8
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,x,xdot,L_null"


def test_simulate_tied_oscillator(capsys):
    code, report, _ = run_json(
        capsys,
        "simulate", "--system", "tied", "--beta0", "2",
        "--ic", "0,1,0", "--h", "1e-3", "--t1", "1",
    )
    assert code == 0
    assert abs(report["final_state"]["x"] - 0.7357588823428847) < 1e-8
    assert report["drift"]["passed"]


def test_compare_routes(capsys):
    code, report, _ = run_json(
        capsys, "compare", "--system", "quadratic", "--ic", "0,0,2", "--h", "1e-3",
        "--t1", "5",
    )
    assert code == 0
    assert report["passed"]
    assert report["max_deviation"] <= 1e-8


def test_audit_command(capsys):
    code, report, _ = run_json(capsys, "audit")
    assert code == 0
    assert report["all_discrepancies_detected"]
    assert report["machine_forms_null"]
    names = {f["name"] for f in report["findings"]}
    assert {
        "oscillator_gauge_scale",
        "displacement_exponent_sign",
        "fraction_family_transcription",
        "oscillator_reciprocity",
    } <= names


def test_reports_are_deterministic_given_seed(capsys):
    _, first, _ = run_json(capsys, "verify", "sin(x)*x'", "--seed", "5")
    _, second, _ = run_json(capsys, "verify", "sin(x)*x'", "--seed", "5")
    assert first == second
