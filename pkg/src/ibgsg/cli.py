"""Command-line front end: analyze, simulate, table2, sweep.

Exit codes: 0 success/stable, 1 validation or compute error, 2 LOS predicted
(analyze), 3 golden-case mismatch (table2).  All numeric output uses 12
significant digits with a ``.`` decimal separator regardless of locale.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import click
import yaml

from . import scenario as scn
from .dynamics import simulate
from .errors import IbgsgError, IntegrationBlowUpError


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"override {pair!r} is not of the form key=value")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value
    return overrides


def _load(path, sets):
    return scn.load_scenario(path, _parse_overrides(sets))


def _verdict_document(analysis) -> dict:
    verdict = analysis.verdict
    eq = analysis.eq
    c = analysis.coeffs
    return {
        "coefficients": {
            "T_p": float(c.t_p),
            "T_eq": float(c.t_eq),
            "alpha": float(c.alpha),
            "a": float(c.p_const),
            "b": float(c.sine_amp),
            "phi": float(c.sine_phase),
            "d": float(c.damp_coeff),
        },
        "equilibria": {
            "exists": bool(eq.exists),
            "delta_e": float(eq.sep),
            "delta_1": float(eq.uep_left),
            "delta_2": float(eq.uep_right),
            "margin": float(eq.margin),
        },
        "initial_state": {
            "delta_pre": float(analysis.init.delta_pre),
            "delta_post": float(analysis.init.delta_post),
            "domega_post": float(analysis.init.domega_post),
            "u_q_post": float(analysis.init.u_q_post),
            "e_k_post": float(analysis.init.e_k_post),
        },
        "verdict": {
            "risk": verdict.risk.value,
            "s1": float(verdict.s1),
            "s2": float(verdict.s2),
            "s3": float(verdict.s3),
            "e_k_post": float(verdict.e_k_post),
            "margin_decel": float(verdict.margin_decel),
            "margin_accel": float(verdict.margin_accel),
            "stable_unified": bool(verdict.stable_unified),
            "stable_type_specific": bool(verdict.stable_type_specific),
            "no_sep": bool(verdict.no_sep),
            "outcome": verdict.outcome,
        },
    }


@click.group()
def main():
    """Transient-stability analysis of an inverter/machine two-source system."""


@main.command()
@click.argument("scenario_path")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE",
              help="Override a scenario field (dotted path).")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the verdict document (YAML) here.")
def analyze(scenario_path, sets, output):
    """Evaluate the stability criterion for one scenario."""
    try:
        scenario = _load(scenario_path, sets)
        analysis = scn.analyze_case(scenario)
    except IbgsgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    doc = _verdict_document(analysis)
    c = doc["coefficients"]
    click.echo(
        "coefficients: "
        + "  ".join(f"{k}={_fmt(v)}" for k, v in c.items())
    )
    e = doc["equilibria"]
    click.echo(
        f"equilibria: exists={str(e['exists']).lower()}  "
        f"delta_e={_fmt(e['delta_e'])}  delta_1={_fmt(e['delta_1'])}  "
        f"delta_2={_fmt(e['delta_2'])}  margin={_fmt(e['margin'])}"
    )
    i = doc["initial_state"]
    click.echo(
        f"initial state: delta_pre={_fmt(i['delta_pre'])}  "
        f"delta_post={_fmt(i['delta_post'])}  domega_post={_fmt(i['domega_post'])}  "
        f"Ek0={_fmt(i['e_k_post'])}"
    )
    v = doc["verdict"]
    click.echo(
        f"areas: S1={_fmt(v['s1'])}  S2={_fmt(v['s2'])}  S3={_fmt(v['s3'])}  "
        f"S1-S2={_fmt(v['s1'] - v['s2'])}"
    )
    click.echo(
        f"verdict: risk={v['risk']}  stable_unified={str(v['stable_unified']).lower()}  "
        f"stable_type_specific={str(v['stable_type_specific']).lower()}  "
        f"no_sep={str(v['no_sep']).lower()}"
    )
    click.echo(f"result: {v['outcome']}")
    if output:
        with open(output, "w") as fh:
            yaml.safe_dump(doc, fh, sort_keys=False)
    sys.exit(0 if v["stable_unified"] else 2)


def _positive_float(ctx, param, value):
    if value is not None and not value > 0.0:
        raise click.BadParameter("must be positive")
    return value


@main.command()
@click.argument("scenario_path")
@click.option("--out", type=click.File("w"), default="-",
              help="Trajectory CSV destination (default stdout).")
@click.option("--dt", type=float, callback=_positive_float, default=None,
              help="Integration step (s).")
@click.option("--t-end", type=float, callback=_positive_float, default=None,
              help="Horizon (s).")
@click.option("--model", type=click.Choice(["full", "reduced"]), default=None)
@click.option("--no-damping", is_flag=True,
              help="Disable the cosine damping term (reduced model).")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
def simulate_cmd(scenario_path, out, dt, t_end, model, no_damping, sets):
    """Time-domain simulation; writes the trajectory CSV."""
    try:
        scenario = _load(scenario_path, sets)
        cfg = scenario.sim
        updates = {}
        if dt is not None:
            updates["dt"] = dt
        if t_end is not None:
            updates["t_end"] = t_end
        if model is not None:
            updates["model"] = model
        if no_damping:
            updates["damping_enabled"] = False
        if updates:
            cfg = replace(cfg, **updates)
        result = simulate(scenario, cfg)
    except IntegrationBlowUpError as exc:
        click.echo(f"error: {exc}", err=True)
        if exc.result is not None:
            exc.result.trajectory.write_csv(out)
        sys.exit(1)
    except IbgsgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    result.trajectory.write_csv(out)
    if result.los is not None:
        click.echo(
            f"LOS event: {result.los.kind.value} at t={_fmt(result.los.time)} s",
            err=True,
        )
    else:
        click.echo("no LOS event", err=True)


@main.command()
@click.option("--format", "fmt", type=click.Choice(["text", "csv"]), default="text")
def table2(fmt):
    """Reproduce the five golden benchmark cases and report pass/fail."""
    try:
        result = scn.run_table2()
    except IbgsgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if fmt == "csv":
        click.echo("case,condition,criterion,simulation,expected_criterion,"
                   "expected_simulation,ok")
        for row in result.rows:
            click.echo(
                f"{row.name},{row.condition_label},{row.report.predicted},"
                f"{row.report.simulated},{row.expected_criterion},"
                f"{row.expected_simulation},{str(row.ok).lower()}"
            )
    else:
        header = (
            f"{'case':<9} {'condition':<16} {'criterion':<18} "
            f"{'simulation':<18} {'ok':<3}"
        )
        click.echo(header)
        for row in result.rows:
            click.echo(
                f"{row.name:<9} {row.condition_label:<16} "
                f"{row.report.predicted:<18} {row.report.simulated:<18} "
                f"{'ok' if row.ok else 'FAIL'}"
            )
    if not result.all_ok:
        for row in result.rows:
            if not row.ok:
                click.echo(
                    f"mismatch in {row.name}: predicted={row.report.predicted} "
                    f"(want {row.expected_criterion}), simulated="
                    f"{row.report.simulated} (want {row.expected_simulation}), "
                    f"condition_ok={row.condition_ok}",
                    err=True,
                )
        sys.exit(3)


def _parse_axis(text) -> scn.SweepAxis:
    if "=" not in text:
        raise click.BadParameter(f"axis {text!r} is not of the form key=start:stop:count")
    path, rng = text.split("=", 1)
    parts = rng.split(":")
    if len(parts) != 3:
        raise click.BadParameter(f"axis range {rng!r} is not start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise click.BadParameter(f"axis range {rng!r}: {exc}") from exc
    return scn.SweepAxis(path.strip(), start, stop, count)


@main.command()
@click.argument("scenario_path")
@click.option("--axis", "axes", multiple=True, required=True,
              metavar="KEY=START:STOP:COUNT")
@click.option("--out", type=click.File("w"), default="-",
              help="Sweep CSV destination (default stdout).")
@click.option("--check-sim", is_flag=True,
              help="Also simulate each grid point and append an agreement column.")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
def sweep(scenario_path, axes, out, check_sim, sets):
    """Grid sweep over scenario parameters; writes the sweep CSV."""
    try:
        raw = scn.apply_overrides(
            scn.load_raw(scenario_path), _parse_overrides(sets)
        )
        spec = scn.SweepSpec(
            raw_scenario=raw,
            axes=tuple(_parse_axis(a) for a in axes),
            check_sim=check_sim,
        )
        result = scn.sweep(spec)
    except IbgsgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    result.write_csv(out)
    for idx, message in result.errors:
        click.echo(f"row {idx}: {message}", err=True)


if __name__ == "__main__":
    main()
