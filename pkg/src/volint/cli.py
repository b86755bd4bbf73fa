"""Batch front end: job files in, p-adic expansions and graph dumps out.

A job file (JSON or TOML) fixes the field, the curve, a command and its
arguments.  All numbers are exact rationals (ints, "a/b" strings, or exact
decimal-free floats are rejected); digits in reports are canonical
representatives in [0, p).

Exit codes: 0 success, 2 schema error, 3 computational error, 4 the job needs
the (unbundled) good-reduction Coleman backend.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .curve import CurvePoint, HyperellipticCurve, MeromorphicForm
from .errors import BackendUnavailable, SchemaError, VolintError
from .padic import FieldSpec
from .polyring import Poly
from .tropical import Graph, cycle_basis, dual_tropical_basis
from .vologodsky import Integrator


def _rational(value, what="value"):
    if isinstance(value, bool) or isinstance(value, float):
        raise SchemaError(f"{what} must be an exact rational, not {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError as exc:
            raise SchemaError(f"{what}: cannot parse rational {value!r}") from exc
    raise SchemaError(f"{what} must be an int or 'a/b' string, got {value!r}")


def working_precision(target, e):
    """A working precision (pi-units) that keeps `target` digits honest.

    Window coefficients of the annulus engine are evaluated at inverse powers
    whose valuation can reach e - 1 per step, so the representation has to
    dominate target + (e-1) * window.
    """
    window = target + 40
    return target + max(1, e - 1) * window + 24


def load_job(path):
    text = open(path, "rb").read()
    if path.endswith(".toml"):
        return _toml_loads(text.decode())
    try:
        return json.loads(text.decode())
    except json.JSONDecodeError:
        try:
            return _toml_loads(text.decode())
        except Exception as exc:
            raise SchemaError(f"job file is neither JSON nor TOML: {exc}") from exc


def _toml_loads(text):
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    return tomllib.loads(text)


class Job:
    def __init__(self, data):
        if not isinstance(data, dict):
            raise SchemaError("job file must hold one object")
        field_block = data.get("field")
        if not isinstance(field_block, dict) or "p" not in field_block:
            raise SchemaError("job needs a 'field' block with at least p")
        p = field_block["p"]
        if not isinstance(p, int):
            raise SchemaError("field.p must be an integer prime")
        modulus = field_block.get("modulus")
        if modulus is not None:
            modulus = [_rational(c, "field.modulus") for c in modulus]
        self.precision = data.get("precision", 20)
        if not isinstance(self.precision, int) or self.precision <= 0:
            raise SchemaError("precision must be a positive integer (pi-units)")
        log_branch = _rational(field_block.get("log_branch", 0), "field.log_branch")
        e_guess = (len(modulus) - 1) if modulus else 1
        prec = field_block.get("working_precision", working_precision(self.precision, e_guess))
        self.field = FieldSpec(
            p,
            modulus,
            prec=prec,
            log_branch=log_branch,
            uniformizer_name=field_block.get("uniformizer_name", "a"),
        )
        curve_block = data.get("curve")
        if not isinstance(curve_block, dict) or "f" not in curve_block:
            raise SchemaError("job needs a 'curve' block with the coefficients f")
        coeffs = [_rational(c, "curve.f") for c in curve_block["f"]]
        self.curve = HyperellipticCurve(self.field, Poly.from_rationals(self.field, coeffs))
        self.command = data.get("command")
        if self.command not in ("integrate", "period", "skeleton", "height"):
            raise SchemaError("command must be one of integrate, period, skeleton, height")
        self.data = data

    def point(self, spec, what="point"):
        if isinstance(spec, str):
            return CurvePoint(self.curve, at_infinity=spec)
        if not isinstance(spec, (list, tuple)) or len(spec) != 2:
            raise SchemaError(f"{what} must be [x, y] or an infinity tag")
        x = _rational(spec[0], what)
        try:
            y = _rational(spec[1], what)
            return CurvePoint(self.curve, x=x, y=y)
        except SchemaError:
            raise
        except VolintError:
            raise

    def snapped_point(self, spec, what="point"):
        """[x, y] with y allowed to be approximate digits; snapped to the curve."""
        if isinstance(spec, str):
            return CurvePoint(self.curve, at_infinity=spec)
        if not isinstance(spec, (list, tuple)) or len(spec) != 2:
            raise SchemaError(f"{what} must be [x, y] or an infinity tag")
        x = self.field.from_rational(_rational(spec[0], what))
        yspec = spec[1]
        if isinstance(yspec, list):
            a = self.field.uniformizer()
            y_hint = self.field.zero()
            for k, d in yspec:
                y_hint = y_hint + self.field.from_rational(_rational(d, what)) * a**k
        else:
            y_hint = self.field.from_rational(_rational(yspec, what))
        return self.curve.point_above(x, y_hint)

    def form(self):
        block = self.data.get("form")
        if not isinstance(block, dict):
            raise SchemaError("this command needs a 'form' block")
        basis = [_rational(c, "form.omega") for c in block.get("omega", [])]
        nus = [
            (_rational(b, "form.nu"), _rational(c, "form.nu")) for b, c in block.get("nu", [])
        ]
        third = [
            (self.point(p, "form.third_kind"), self.point(q, "form.third_kind"), _rational(c, "form.third_kind"))
            for p, q, c in block.get("third_kind", [])
        ]
        return MeromorphicForm(self.curve, basis, nus, third)


def _apply_overrides(job, integrator):
    overrides = job.data.get("overrides", {})
    for entry in overrides.get("reference_points", []):
        idx = entry["edge"]
        pt = job.snapped_point(entry["point"], "reference point")
        integrator.set_reference_point(idx, pt)


def run(job_path, json_out=None, stream=None):
    """Execute a job file and print the deterministic text report."""
    stream = stream or sys.stdout
    job = Job(load_job(job_path))
    integrator = Integrator(job.curve, target_prec=min(job.precision + 8, job.field.prec))
    _apply_overrides(job, integrator)
    result = {"command": job.command, "p": job.field.p, "precision": job.precision}
    lines = [f"command: {job.command}"]
    N = job.precision
    if job.command == "integrate":
        form = job.form()
        start = job.snapped_point(job.data["points"]["S"], "points.S")
        end = job.snapped_point(job.data["points"]["R"], "points.R")
        path_points = None
        path_block = job.data.get("path")
        if path_block and "points" in path_block:
            path_points = [job.snapped_point(p, "path point") for p in path_block["points"]]
        elif path_block and "edges" in path_block:
            path_points = [int(i) for i in path_block["edges"]]
        value = integrator.integrate(form, start, end, path_points=path_points)
        rendered = value.expansion_str(N)
        lines.append(f"vologodsky integral = {rendered}")
        result["value"] = rendered
        result["digits"] = value.digits(hi=N)
    elif job.command == "period":
        form = job.form()
        graph = Graph.from_covering(integrator.d_graph)
        cycles = cycle_basis(graph)
        values = []
        for i, cyc in enumerate(cycles):
            pts = integrator.cycle_realization(cyc)
            val = integrator.bc_period(form, pts)
            rendered = val.expansion_str(N)
            lines.append(f"period along cycle {i} ({cyc}): {rendered}")
            values.append({"cycle": cyc, "value": rendered})
        result["periods"] = values
    elif job.command == "skeleton":
        result.update(_skeleton_report(job, integrator, lines))
    elif job.command == "height":
        block = job.data.get("height")
        if not isinstance(block, dict):
            raise SchemaError("height command needs a 'height' block with P and R")
        P = job.snapped_point(block["P"], "height.P")
        R = job.snapped_point(block["R"], "height.R")
        value = integrator.coleman_gross_hp(P, R)
        rendered = value.expansion_str(N)
        lines.append(f"h_p(P,R) = {rendered}")
        result["h_p"] = rendered
        away = block.get("away")
        if away:
            total = job.field.zero()
            for q, n in away.get("log_terms", []):
                q = _rational(q, "away.log_terms")
                term = job.field.from_rational(_rational(n, "away.log_terms")).log()
                total = total + term.scale_rational(q)
            lines.append(f"away-from-p contribution = {total.expansion_str(N)}")
            glob = value + total
            lines.append(f"global height = {glob.expansion_str(N)}")
            result["away"] = total.expansion_str(N)
            result["global"] = glob.expansion_str(N)
    report = "\n".join(lines) + "\n"
    stream.write(report)
    if json_out:
        with open(json_out, "w") as fh:
            json.dump(result, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    return result


def _skeleton_report(job, integrator, lines):
    out = {}
    cg, dg = integrator.c_graph, integrator.d_graph
    lines.append(f"Gamma(C): {len(cg.vertices)} vertices, {len(cg.edges)} edges (tree)")
    lines.append(f"Gamma(D): {len(dg.vertices)} vertices, {len(dg.edges)} edges, h = {dg.betti}")
    verts = []
    for v in dg.vertices:
        model = integrator.model_for_dvertex(v)
        desc = {
            "index": v.index,
            "kind": v.kind,
            "component": v.label,
            "center": v.center.expansion_str(min(6, job.precision)),
            "deg_g": model.g.degree(),
            "half_edges": len(v.half_edges),
        }
        verts.append(desc)
        lines.append(
            f"  vertex {v.index} [{v.label}] {v.kind}, deg g = {model.g.degree()},"
            f" marks = {len(v.half_edges)}"
        )
    out["vertices"] = verts
    edges = []
    for e in dg.edges:
        desc = {
            "index": e.index,
            "tail": e.tail,
            "head": e.head,
            "interval": [str(e.interval[0]), str(e.interval[1])],
            "sheet": e.sheet,
        }
        edges.append(desc)
        lines.append(
            f"  edge {e.index}: {e.tail} -> {e.head}, v(x-c) in ({e.interval[0]}, {e.interval[1]})"
        )
    out["edges"] = edges
    graph = Graph.from_covering(dg)
    cycles = cycle_basis(graph)
    out["cycles"] = cycles
    lines.append(f"cycle basis: {cycles}")
    if cycles:
        etas = dual_tropical_basis(graph, cycles)
        out["tropical_forms"] = [[str(v) for v in eta.values] for eta in etas]
        for i, eta in enumerate(etas):
            lines.append(f"eta_{i}: {[str(v) for v in eta.values]}")
    if job.data.get("models"):
        models = []
        for v in dg.vertices:
            model = integrator.model_for_dvertex(v)
            models.append(
                {
                    "vertex": v.index,
                    "g": [c.expansion_str(min(8, job.precision)) for c in model.g.coeffs],
                    "holes": [
                        {"center": h.center.expansion_str(6), "count": h.count, "L": h.L}
                        for h in model.holes
                    ],
                    "outer_degree": (model.outer.factor.degree() if model.outer else 0),
                }
            )
        out["models"] = models
    if job.data.get("dot"):
        dot = ["graph skeleton {"]
        for v in dg.vertices:
            dot.append(f'  v{v.index} [label="{v.index}{v.label}"];')
        for e in dg.edges:
            dot.append(f'  v{e.tail} -- v{e.head} [label="e{e.index}"];')
        dot.append("}")
        out["dot"] = "\n".join(dot)
        lines.append(out["dot"])
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="volint",
        description="Vologodsky integrals on bad-reduction hyperelliptic curves",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    runp = sub.add_parser("run", help="execute a job file")
    runp.add_argument("job")
    runp.add_argument("--json-out", default=None, help="write the machine-readable twin here")
    skel = sub.add_parser("skeleton", help="dump the covering graphs of a job's curve")
    skel.add_argument("job")
    skel.add_argument("--models", action="store_true", help="include per-vertex (g, h, k) data")
    skel.add_argument("--dot", action="store_true", help="emit a DOT drawing")
    skel.add_argument("--json-out", default=None)
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "run":
            run(args.job, json_out=args.json_out)
        else:
            data = load_job(args.job)
            data["command"] = "skeleton"
            if args.models:
                data["models"] = True
            if args.dot:
                data["dot"] = True
            import tempfile, os

            with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
                json.dump(data, fh, default=str)
                tmp = fh.name
            try:
                run(tmp, json_out=args.json_out)
            finally:
                os.unlink(tmp)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"schema error: cannot read job file: {exc}", file=sys.stderr)
        return 2
    except BackendUnavailable as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return 4
    except VolintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
