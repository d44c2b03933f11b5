"""Command line entry point: ``teachlab <command>``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 the
operation was refused by a budget (``TEACHLAB_BUDGET`` sets the bit-operation
budget).
"""

from __future__ import annotations

import sys
from dataclasses import asdict

import click

from . import __version__, budget, oracles
from .ccls import FormatError, read_ccls, write_ccls
from .errors import BudgetExceeded, PreconditionError
from .experiment import SUITES, ExperimentConfig, analytic, build, dump_json, run_experiment, run_suites
from .greedy import estimate_cost, greedy_teach, write_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _widths(ctx, param, value):
    if value is None:
        return None
    try:
        out = tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None
    if not out:
        raise click.BadParameter("no widths given")
    return out


def _emit(obj) -> None:
    click.echo(dump_json(obj), nl=False)


def _fail(code: int, message: str, payload=None):
    if payload is not None:
        _emit(payload)
    click.echo(f"teachlab: {message}", err=True)
    sys.exit(code)


def _load(path: str):
    try:
        return read_ccls(path)
    except (OSError, FormatError, ValueError) as exc:
        _fail(EXIT_USAGE, f"cannot read {path}: {exc}")


class _Guard:
    """Map library errors onto exit codes."""

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if isinstance(exc, BudgetExceeded):
            payload = None
            if exc.analytic is not None:
                payload = dict(refused=True, reason=str(exc), analytic=exc.analytic.to_json())
            _fail(EXIT_BUDGET, str(exc), payload)
        if isinstance(exc, (PreconditionError, FormatError)):
            _fail(EXIT_USAGE, str(exc))
        return False


@click.group()
@click.version_option(__version__, prog_name="teachlab")
def main():
    """Greedy teaching sets and their lower-bound constructions."""


@main.command()
@click.option("--construction", type=click.Choice(["rectangles", "headtail"]), required=True)
@click.option("--levels", "-N", type=int, required=True)
@click.option("-k", "k", type=int, default=2, show_default=True, help="head/tail parameter")
@click.option("--widths", callback=_widths, help="comma-separated widths w_1..w_N")
@click.option("--schedule", type=click.Choice(["paper", "custom"]), default=None, help="paper selects the default width schedule")
@click.option("--force", is_flag=True, help="build even if the width schedule fails validation")
@click.option("--analytic-only", is_flag=True, help="print exact sizes without materializing")
@click.option("--out", type=click.Path(dir_okay=False), help="class file to write")
def gen(construction, levels, k, widths, schedule, force, analytic_only, out):
    """Generate a construction and write it as a CCLS file."""
    with _Guard():
        cfg = ExperimentConfig(construction=construction, levels=levels, k=k, widths=widths, force=force,
                               schedule=schedule or ("custom" if widths else "paper"))
        counts = analytic(cfg)
        if analytic_only:
            _emit(counts.to_json())
            return
        if not out:
            raise click.UsageError("--out is required unless --analytic-only is given")
        try:
            C = build(cfg)
        except PreconditionError as exc:
            if "domination" in str(exc):
                _fail(EXIT_FAIL, str(exc), dict(analytic=counts.to_json()))
            raise
        write_ccls(C, out)
        _emit(dict(analytic=counts.to_json(), materialized=dict(points=C.n_points, concepts=len(C)), out=out))


@main.command()
@click.option("--class", "class_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("-k", "k", type=int, required=True, help="greediness: points per round")
@click.option("--trace", type=click.Path(dir_okay=False), help="CSV trace to write")
@click.option("--backend", type=click.Choice(["cython", "python"]), default=None)
def greedy(class_path, k, trace, backend):
    """Run the greedy procedure and report the teaching set."""
    C = _load(class_path)
    with _Guard():
        if k < 1:
            raise PreconditionError("k must be at least 1")
        budget.require_within(estimate_cost(C, k), "greedy scan")
        cert, tr = greedy_teach(C, k, backend)
        final_hex = C.concept(cert.concept_index).to_hex()
        if trace:
            with open(trace, "w", newline="") as fh:
                write_trace(tr, fh, final_hex)
        _emit(dict(
            k=k,
            size=tr.size,
            iterations=len(tr.steps),
            concept_index=cert.concept_index,
            concept_hex=final_hex,
            concept_tags=list(C.origins(cert.concept_index)),
            teaching_set=list(cert.teaching_set),
        ))


@main.command()
@click.option("--class", "class_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--suite", "suites", multiple=True, required=True,
              help=f"repeatable or comma-separated: {', '.join(SUITES)}")
@click.option("-k", "k", type=int, default=None, help="greediness for dynamics/crosscheck")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--vc-size", type=int, default=None)
@click.option("--vc-samples", type=int, default=1000, show_default=True)
def verify(class_path, suites, k, seed, trials, vc_size, vc_samples):
    """Run verification suites; exit 1 if any fails."""
    names = [s.strip() for item in suites for s in item.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise click.BadParameter(f"unknown suite(s) {unknown}; choose from {list(SUITES)}", param_hint="--suite")
    C = _load(class_path)
    with _Guard():
        results = run_suites(C, names, k=k, seed=seed, trials=trials, vc_size=vc_size, vc_samples=vc_samples)
    ok = all(r["ok"] for r in results.values())
    _emit(dict(ok=ok, suites=results))
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@main.command()
@click.option("--class", "class_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice(["exact", "sample"]), default="exact", show_default=True)
@click.option("--size", type=int, default=None, help="subset size for sample mode")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def vc(class_path, mode, size, samples, seed):
    """Exact or sampled VC-dimension evidence."""
    C = _load(class_path)
    with _Guard():
        _emit(asdict(oracles.vc_dimension(C, mode, size, samples, seed)))


@main.command()
@click.option("--class", "class_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice(["exhaustive", "structured"]), default="exhaustive", show_default=True)
@click.option("--cap", type=int, default=3, show_default=True, help="largest set size for exhaustive mode")
def tsmin(class_path, mode, cap):
    """Search for a smallest teaching set of any concept."""
    C = _load(class_path)
    with _Guard():
        report = oracles.ts_min_search(C, mode, cap)
    _emit(dict(asdict(report), size=report.size))


@main.command()
@click.option("--class", "class_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("-k", "k", type=int, required=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def crosscheck(class_path, k, trials, seed):
    """Compare the fast best restriction with the brute-force oracle on random subclasses."""
    C = _load(class_path)
    with _Guard():
        report = oracles.crosscheck(C, k, trials, seed)
    _emit(asdict(report))
    sys.exit(EXIT_OK if report.ok else EXIT_FAIL)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON config; flags override it")
@click.option("--construction", type=click.Choice(["rectangles", "headtail"]), default=None)
@click.option("--levels", "-N", type=int, default=None)
@click.option("-k", "k", type=int, default=None)
@click.option("--widths", callback=_widths, default=None)
@click.option("--schedule", type=click.Choice(["paper", "custom"]), default=None)
@click.option("--force", is_flag=True, default=None)
@click.option("--greedy-k", type=int, default=None)
@click.option("--suite", "suites", multiple=True)
@click.option("--budget", "op_budget", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--class-out", type=click.Path(dir_okay=False), default=None)
@click.option("--trace", "trace_out", type=click.Path(dir_okay=False), default=None)
@click.option("--report", "report_out", type=click.Path(dir_okay=False), default=None)
@click.option("--timings", is_flag=True, help="add wall-clock seconds to the report (breaks byte-identity)")
def run(config_path, suites, op_budget, timings, **flags):
    """Build, teach and verify in one go; prints the JSON report."""
    with _Guard():
        cfg = ExperimentConfig.from_json(config_path) if config_path else ExperimentConfig()
        names = tuple(s.strip() for item in suites for s in item.split(",") if s.strip())
        cfg = cfg.override(suites=names, budget=op_budget, force=flags.pop("force") or None, **flags)
        report = run_experiment(cfg, timings=timings)
    _emit(report)
    sys.exit(EXIT_OK if report["ok"] else EXIT_FAIL)


@main.command("analytic")
@click.option("--construction", type=click.Choice(["rectangles", "headtail"]), required=True)
@click.option("--levels", "-N", type=int, required=True)
@click.option("-k", "k", type=int, default=2, show_default=True)
@click.option("--widths", callback=_widths, default=None)
def analytic_cmd(construction, levels, k, widths):
    """Exact sizes and bound checks, never materializing (same as gen --analytic-only)."""
    with _Guard():
        cfg = ExperimentConfig(construction=construction, levels=levels, k=k, widths=widths)
        counts = analytic(cfg)
    _emit(counts.to_json())
    sys.exit(EXIT_OK if all(counts.checks.values()) else EXIT_FAIL)


if __name__ == "__main__":
    main()
