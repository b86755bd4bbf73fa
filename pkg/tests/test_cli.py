"""Job files, reports, exit codes, and determinism."""

import io
import json

from volint.cli import main, run


def _write_job(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


ELLIPTIC_FIELD = {"p": 43}
ELLIPTIC_CURVE = {"f": [555015942, -1351755, 0, 1]}


def test_integrate_job(tmp_path):
    job = _write_job(
        tmp_path,
        "job.json",
        {
            "field": ELLIPTIC_FIELD,
            "curve": ELLIPTIC_CURVE,
            "command": "integrate",
            "precision": 6,
            "form": {"omega": [1]},
            "points": {"S": [219, -16416], "R": [219, 16416]},
        },
    )
    out = io.StringIO()
    result = run(job, stream=out)
    assert "12*43^2 + 43^3 + 18*43^4 + 40*43^5 + O(43^6)" in out.getvalue()
    assert result["value"].startswith("12*43^2")


def test_height_job_with_away_part(tmp_path):
    job = _write_job(
        tmp_path,
        "height.json",
        {
            "field": ELLIPTIC_FIELD,
            "curve": ELLIPTIC_CURVE,
            "command": "height",
            "precision": 6,
            "height": {
                "P": [379, 9856],
                "R": [-501, 33264],
                "away": {"log_terms": [["-2/3", 2], [2, 5], ["-2/3", 11]]},
            },
        },
    )
    out = io.StringIO()
    result = run(job, stream=out)
    text = out.getvalue()
    assert "h_p(P,R) = 43 + 21*43^2 + 28*43^3 + 25*43^4 + 3*43^5 + O(43^6)" in text
    assert "42*43 + 21*43^2 + 14*43^3 + 17*43^4 + 39*43^5 + O(43^6)" in text
    assert result["global"] == "O(43^6)"


def test_skeleton_job_banana(tmp_path):
    # (x^2 - x - 1)(x^4 + x^3 - 6x^2 + 5x - 5) = x^6 - 8x^4 + 10x^3 - 4x^2 + 5
    job = _write_job(
        tmp_path,
        "skel.json",
        {
            "field": {"p": 5},
            "curve": {"f": [5, 0, -4, 10, -8, 0, 1]},
            "command": "skeleton",
            "precision": 8,
            "models": True,
        },
    )
    out = io.StringIO()
    result = run(job, stream=out)
    assert "h = 2" in out.getvalue()
    assert len(result["vertices"]) == 5
    assert len(result["edges"]) == 6
    etas = result["tropical_forms"]
    assert sorted(set(etas[0])) == sorted({"1/3", "-1/3", "1/6", "-1/6"})
    assert any(v["deg_g"] == 2 for v in result["vertices"])
    assert any(len(m["g"]) == 3 for m in result["models"])


def test_schema_error_exit_code(tmp_path):
    bad = _write_job(tmp_path, "bad.json", {"field": {"p": 43}, "command": "integrate"})
    assert main(["run", bad]) == 2
    bad2 = _write_job(
        tmp_path,
        "bad2.json",
        {
            "field": {"p": 43},
            "curve": ELLIPTIC_CURVE,
            "command": "integrate",
            "precision": 6,
            "form": {"omega": [0.5]},  # float: rejected
            "points": {"S": [219, -16416], "R": [219, 16416]},
        },
    )
    assert main(["run", bad2]) == 2


def test_backend_unavailable_exit_code(tmp_path):
    job = _write_job(
        tmp_path,
        "deep.json",
        {
            "field": {"p": 5},
            "curve": {"f": [0, 50, -15, 1]},  # x(x-5)(x-10)
            "command": "integrate",
            "precision": 6,
            "form": {"omega": [1]},
            "points": {"S": [50, 300], "R": [50, -300]},
        },
    )
    assert main(["run", job]) == 4


def test_reports_are_byte_identical(tmp_path):
    job = _write_job(
        tmp_path,
        "job.json",
        {
            "field": ELLIPTIC_FIELD,
            "curve": ELLIPTIC_CURVE,
            "command": "integrate",
            "precision": 6,
            "form": {"omega": [0, 1]},
            "points": {"S": [219, -16416], "R": [219, 16416]},
        },
    )
    out1, out2 = io.StringIO(), io.StringIO()
    run(job, stream=out1)
    run(job, stream=out2)
    assert out1.getvalue() == out2.getvalue()


def test_json_twin_round_trips(tmp_path):
    job = _write_job(
        tmp_path,
        "job.json",
        {
            "field": ELLIPTIC_FIELD,
            "curve": ELLIPTIC_CURVE,
            "command": "integrate",
            "precision": 6,
            "form": {"omega": [1]},
            "points": {"S": [219, -16416], "R": [219, 16416]},
        },
    )
    twin = str(tmp_path / "out.json")
    out = io.StringIO()
    run(job, json_out=twin, stream=out)
    data = json.loads(open(twin).read())
    assert data["value"] in out.getvalue()
    # re-render the digits and reproduce the text form
    digs = data["digits"]
    parts = []
    for i, d in digs:
        if i == 0:
            parts.append(f"{d}")
        elif i == 1:
            parts.append(f"{d}*43" if d != 1 else "43")
        else:
            parts.append(f"{d}*43^{i}" if d != 1 else f"43^{i}")
    rendered = " + ".join(parts) + " + O(43^6)" if parts else "O(43^6)"
    assert rendered == data["value"]


def test_toml_job(tmp_path):
    path = tmp_path / "job.toml"
    path.write_text(
        """
command = "integrate"
precision = 6

[field]
p = 43

[curve]
f = [555015942, -1351755, 0, 1]

[form]
omega = [1]

[points]
S = [219, -16416]
R = [219, 16416]
"""
    )
    out = io.StringIO()
    result = run(str(path), stream=out)
    assert result["value"].startswith("12*43^2")
