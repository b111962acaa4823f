"""
Command line for the C-function toolkit

Results go to standard output as JSON, CSV or a rich table; logs go to
standard error. Exit codes: 0 success, 1 failed invariant, 2 bad input.
"""

import csv
import functools
import io
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
import dotenv
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .config import FORMAT_ENV, LOG_LEVEL_ENV, SEED_ENV, WORKERS_ENV, OutputFormat, RunConfig
from .cyclotomic_sums import (
    jacobi_sum_exact,
    ratio_is_root_of_unity,
    stickelberger_reduce,
)
from .equivariant_geometry import (
    SubgroupChar,
    all_subgroup_chars,
    certify_anisotropy,
    classify_setup,
    equivariant_space,
    perturbation_split,
    transversality_at,
)
from .errors import CFunctionError
from .group_fourier import DirichletChar
from .logging_setup import configure_logging
from .models import JacobiReport
from .orbit_classifier import find_representative, scan_all_pairs
from .solver.biunimodular import biunimodular_search
from .solver.fiber import start_fiber
from .solver.supports import chebotarev_minor, chebotarev_scan, uncertainty_sweep
from .solver.tracking import SolveMethod, solve_equivariant, solve_odd_cfunctions
from .verify import CheckLevel, registry

Payload = Any


def _dump(item: Payload) -> Any:
    if isinstance(item, BaseModel):
        return item.model_dump(mode="json")
    if isinstance(item, list):
        return [_dump(x) for x in item]
    if isinstance(item, dict):
        return {k: _dump(v) for k, v in item.items()}
    return item


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value)
    return "" if value is None else str(value)


def emit(payload: Payload, config: RunConfig, rows: Optional[Sequence[Payload]] = None,
         title: str = "") -> None:
    """Write payload in the configured format; rows replace it for csv and table"""
    fmt = config.output_format
    if fmt == OutputFormat.JSON:
        click.echo(json.dumps(_dump(payload), indent=2))
        return

    data = _dump(rows if rows is not None else payload)
    if isinstance(data, dict):
        data = [data]
    columns: List[str] = []
    for row in data:
        columns.extend(k for k in row if k not in columns)

    if fmt == OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in data:
            writer.writerow({k: _cell(row.get(k)) for k in columns})
        click.echo(buffer.getvalue(), nl=False)
        return

    table = Table(title=title or None)
    for column in columns:
        table.add_column(column, overflow="fold")
    for row in data:
        table.add_row(*(_cell(row.get(k)) for k in columns))
    Console(file=sys.stdout, width=160).print(table)


def handle_errors(fn: Callable) -> Callable:
    """Map toolkit errors to a red line on stderr and exit code 2"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (CFunctionError, ValidationError) as exc:
            Console(file=sys.stderr).print(f"error: {exc}", style="bold red", markup=False)
            sys.exit(2)
    return wrapper


def _flatten_solution(entry: Dict[str, Any]) -> Dict[str, Any]:
    row = {"multiplicity": entry["multiplicity"], "residual": entry["residual"]}
    row.update(entry["tags"])
    row["f"] = entry["f"]
    return row


@click.group()
@click.option("--seed", type=int, envvar=SEED_ENV, default=None, help="Global random seed")
@click.option("--workers", type=int, envvar=WORKERS_ENV, default=None, help="Worker processes")
@click.option("--format", "output_format", envvar=FORMAT_ENV, default=None,
              type=click.Choice([f.value for f in OutputFormat]), help="Output format")
@click.option("--log-level", envvar=LOG_LEVEL_ENV, default="WARNING", show_default=True)
@click.option("--json-logs", is_flag=True, help="Render log events as JSON")
@click.version_option(__version__, prog_name="cfunc")
@click.pass_context
@handle_errors
def cli(ctx: click.Context, seed: Optional[int], workers: Optional[int],
        output_format: Optional[str], log_level: str, json_logs: bool) -> None:
    """Compute, classify and count C-functions on cyclic groups."""
    configure_logging(log_level, json_logs)
    ctx.obj = RunConfig.from_env(seed=seed, workers=workers, output_format=output_format)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--j1", type=int, required=True, help="Exponent of the first character")
@click.option("--j2", type=int, required=True, help="Exponent of the second character")
@click.option("--exact", is_flag=True, help="Include the coefficients in Z[zeta_(p-1)]")
@click.pass_obj
@handle_errors
def jacobi(config: RunConfig, p: int, j1: int, j2: int, exact: bool) -> None:
    """Jacobi sum J(omega^j1, omega^j2)."""
    value = jacobi_sum_exact(DirichletChar(p, j1), DirichletChar(p, j2))
    z = value.to_complex()
    report = JacobiReport(p=p, t1=j1 % (p - 1), t2=j2 % (p - 1), complex=(z.real, z.imag),
                          cycint=value.to_model() if exact else None)
    emit(report, config)


@cli.command("classify-ratio")
@click.option("--p", "p", type=int, required=True)
@click.option("--j1", type=int, default=None)
@click.option("--j2", type=int, default=None)
@click.pass_context
@handle_errors
def classify_ratio(ctx: click.Context, p: int, j1: Optional[int], j2: Optional[int]) -> None:
    """Whether J(conj chi1, chi2)/J(chi1, chi2) is a root of unity; all pairs when exponents are omitted."""
    config: RunConfig = ctx.obj
    if j1 is not None and j2 is not None:
        pairs = [(j1, j2)]
    else:
        pairs = [(a, b) for a in range(1, p - 1) for b in range(1, p - 1)]
    reports = [ratio_is_root_of_unity(DirichletChar(p, a), DirichletChar(p, b)) for a, b in pairs]
    emit(reports[0] if len(reports) == 1 else reports, config, title=f"Jacobi ratios p={p}")
    if not all(r.consistent for r in reports):
        ctx.exit(1)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--j", "j", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@click.pass_context
@handle_errors
def stickelberger(ctx: click.Context, p: int, j: Optional[int], k: Optional[int]) -> None:
    """J_{j,k} mod p against -C(j+k, k); every pair when j, k are omitted."""
    config: RunConfig = ctx.obj
    if j is not None and k is not None:
        reports = [stickelberger_reduce(p, j, k)]
    else:
        reports = [stickelberger_reduce(p, a, b) for a in range(1, p - 1) for b in range(1, p - 1)]
    emit(reports[0] if len(reports) == 1 else reports, config, title=f"Reductions p={p}")
    if not all(r.agree and r.vanishes == r.predicted_vanishing for r in reports):
        ctx.exit(1)


@cli.command("lemma41-scan")
@click.option("--d", "d", type=int, required=True)
@click.option("--j", "j", type=int, default=None, help="Classify one pair instead of scanning")
@click.option("--k", "k", type=int, default=None)
@click.pass_context
@handle_errors
def lemma41_scan(ctx: click.Context, d: int, j: Optional[int], k: Optional[int]) -> None:
    """Orbit representatives of pairs (j, k) mod d and the exceptional families."""
    config: RunConfig = ctx.obj
    if j is not None and k is not None:
        emit(find_representative(d, j, k), config)
        return
    scan = scan_all_pairs(d)
    emit(scan, config, rows=scan.exceptional, title=f"Exceptional pairs d={d}")
    if not scan.consistent:
        ctx.exit(1)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, default=None, help="Index of H; all subgroups when omitted")
@click.option("--c", "c", type=int, default=None, help="Exponent of c on H")
@click.pass_context
@handle_errors
def transversality(ctx: click.Context, p: int, n: Optional[int], c: Optional[int]) -> None:
    """Criterion and numeric transversality at every character extending c."""
    config: RunConfig = ctx.obj
    if n is not None:
        subs = [SubgroupChar(p, n, c)] if c is not None else \
            [s for s in all_subgroup_chars(p) if s.n == n]
    else:
        subs = all_subgroup_chars(p)
    reports = [transversality_at(chi, sub, config.tol.rank)
               for sub in subs for chi in sub.extensions()]
    emit(reports, config, title=f"Transversality p={p}")
    if not all(r.agree for r in reports):
        ctx.exit(1)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.pass_obj
@handle_errors
def setup(config: RunConfig, p: int) -> None:
    """Choice of (H, c) for a prime p >= 11."""
    emit(classify_setup(p), config)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--trials", type=int, default=None, help="Minimization starts [default: config budget]")
@click.option("--perturb", is_flag=True, help="Also split the Legendre cluster under e^{tX}")
@click.pass_context
@handle_errors
def hessian(ctx: click.Context, p: int, trials: Optional[int], perturb: bool) -> None:
    """Hessian map Q at the Legendre character: anisotropy and fiber counts."""
    config: RunConfig = ctx.obj
    report = certify_anisotropy(p, config, trials=trials)
    ok = (report.regular_fiber_count == report.expected_fiber_count
          and report.first_derivative_norm < 1e-6
          and sum(report.real_counts) <= 2 ** (report.n - 1))
    if perturb:
        emit({"anisotropy": report, "perturbation": perturbation_split(p, config)}, config,
             rows=[report])
    else:
        emit(report, config)
    if not ok:
        ctx.exit(1)


def _solution_report(ctx: click.Context, result, config: RunConfig) -> None:
    rows = [_flatten_solution(e) for e in _dump(result.solutions)]
    emit(result, config, rows=rows, title=f"C-functions d={result.d} ({result.method})")
    if result.incomplete or not result.balanced:
        ctx.exit(1)


@cli.command()
@click.option("--d", "d", type=int, default=None, help="Odd modulus for the odd space")
@click.option("--method", type=click.Choice([m.value for m in SolveMethod]),
              default=SolveMethod.LEMMA68.value, show_default=True)
@click.option("--space", type=click.Choice(["odd", "equivariant"]), default="odd", show_default=True)
@click.option("--p", "p", type=int, default=None, help="Prime for --space equivariant")
@click.option("--n", "n", type=int, default=None, help="Index of H for --space equivariant")
@click.option("--c", "c", type=int, default=1, show_default=True, help="Exponent of c on H")
@click.option("--seed", type=int, default=None, help="Overrides the global seed")
@click.pass_context
@handle_errors
def solve(ctx: click.Context, d: Optional[int], method: str, space: str, p: Optional[int],
          n: Optional[int], c: int, seed: Optional[int]) -> None:
    """All C-functions in a coset space, with multiplicities."""
    config: RunConfig = ctx.obj.with_seed(seed)
    if space == "equivariant":
        if p is None or n is None:
            raise click.UsageError("--space equivariant needs --p and --n")
        result = solve_equivariant(SubgroupChar(p, n, c), config)
    else:
        if d is None:
            raise click.UsageError("--d is required for the odd space")
        result = solve_odd_cfunctions(d, SolveMethod(method), config)
    _solution_report(ctx, result, config)


@cli.command("start-fiber")
@click.option("--p", "p", type=int, required=True)
@click.option("--n", "n", type=int, default=None, help="Index of H; the odd space when omitted")
@click.option("--c", "c", type=int, default=1, show_default=True)
@click.pass_obj
@handle_errors
def start_fiber_cmd(config: RunConfig, p: int, n: Optional[int], c: int) -> None:
    """The explicit solutions over (1_H, 1_H)."""
    sub = SubgroupChar(p, n, c) if n is not None else SubgroupChar.odd(p)
    pairs = start_fiber(equivariant_space(sub), config)
    rows = [{"A": list(s.A), "B": list(s.B), "residual": s.residual, "condition": s.condition,
             "f": s.f.to_pairs()} for s in pairs]
    emit(rows, config, title=f"Start fiber p={p}")


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--trials", type=int, default=None, help="Random starts [default: config budget]")
@click.option("--seeded", is_flag=True, help="Add jittered starts at every known family member")
@click.option("--seed", type=int, default=None, help="Overrides the global seed")
@click.pass_context
@handle_errors
def biunimodular(ctx: click.Context, p: int, trials: Optional[int], seeded: bool, seed: Optional[int]) -> None:
    """Search for biunimodular functions and tag them against the known families."""
    config: RunConfig = ctx.obj.with_seed(seed)
    report = biunimodular_search(p, trials, config, seeded=seeded)
    emit(report, config, rows=report.found, title=f"Biunimodular p={p}")
    if report.false_new:
        ctx.exit(1)


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.pass_context
@handle_errors
def uncertainty(ctx: click.Context, p: int, samples: int) -> None:
    """Support bound #supp f + #supp f^ >= p + 1 on random functions."""
    config: RunConfig = ctx.obj
    reports = uncertainty_sweep(p, samples, config)
    summary = {
        "p": p, "samples": samples,
        "violations": sum(1 for r in reports if not r.holds),
        "extremal": sum(1 for r in reports if r.extremal),
    }
    emit(summary, config)
    if summary["violations"]:
        ctx.exit(1)


def _index_list(value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    return [int(x) for x in value.split(",") if x.strip()]


@cli.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--max-size", type=int, default=None, help="Scan every minor up to this size")
@click.option("--rows", "rows_opt", default=None, help="Comma-separated row indices")
@click.option("--cols", "cols_opt", default=None, help="Comma-separated column indices")
@click.pass_context
@handle_errors
def chebotarev(ctx: click.Context, p: int, max_size: Optional[int], rows_opt: Optional[str],
               cols_opt: Optional[str]) -> None:
    """Minors of the p-th root-of-unity matrix."""
    config: RunConfig = ctx.obj
    rows, cols = _index_list(rows_opt), _index_list(cols_opt)
    if rows is not None and cols is not None:
        report = chebotarev_minor(p, rows, cols)
        emit(report, config)
        if not report.nonzero:
            ctx.exit(1)
        return
    checked, vanishing = chebotarev_scan(p, max_size or min(p, 3), config)
    emit({"p": p, "checked": checked, "vanishing": vanishing}, config,
         rows=[{"p": p, "checked": checked, "vanishing": len(vanishing)}])
    if vanishing:
        ctx.exit(1)


@cli.command()
@click.option("--level", type=click.Choice([lvl.value for lvl in CheckLevel]),
              default=CheckLevel.FAST.value, show_default=True)
@click.pass_context
@handle_errors
def verify(ctx: click.Context, level: str) -> None:
    """Run the acceptance checks and print a pass/fail table (CSV rows with --format csv)."""
    config: RunConfig = ctx.obj
    results = registry.run(CheckLevel(level), config)
    if config.output_format != OutputFormat.CSV:
        table = Table(title=f"Acceptance checks ({level})")
        table.add_column("Check", style="cyan")
        table.add_column("Category", style="magenta")
        table.add_column("Status")
        table.add_column("Seconds", justify="right")
        table.add_column("Detail", overflow="fold")
        for r in results:
            status = "[green]PASS[/green]" if r.passed else "[bold red]FAIL[/bold red]"
            table.add_row(r.name, r.category, status, f"{r.seconds:.2f}", r.detail)
        Console(file=sys.stdout, width=160).print(table)
    else:
        emit(results, config)
    if not all(r.passed for r in results):
        ctx.exit(1)


def main() -> None:
    dotenv.load_dotenv()
    cli()


if __name__ == "__main__":
    main()
