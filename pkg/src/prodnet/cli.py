"""
Command Line Interface for prodnet.

Every analysis subcommand reads an economy file and an equilibrium flow file
(or a built-in example via ``--demo``) and prints a table, versioned CSV or
JSON. Analysis errors exit with status 1 and ``<ErrorName>: <message>`` on
stderr; usage errors exit with status 2.
"""

import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click
from dotenv import load_dotenv

from . import __version__
from .analyzers import (
    CentralityAnalyzer,
    FragilityAnalyzer,
    HultenAnalyzer,
    MediumRunAnalyzer,
    PowerAnalyzer,
    PropagationAnalyzer,
    PropagationConfig,
)
from .analyzers.fragility import configuration_table
from .config import get_settings
from .core_model import country_gdp, load_economy, load_flow_state, validate_equilibrium
from .data_objects import Economy, FlowState, ShockSpec
from .errors import ProdnetError
from .fixtures import FixtureId, build, emit, list_fixtures
from .report_generator import OutputFormat, ReportGenerator

logger = logging.getLogger(__name__)


class ProdnetGroup(click.Group):
    """Click group that turns library errors into exit status 1."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except ProdnetError as exc:
            click.echo(f"{exc.name}: {exc}", err=True)
            ctx.exit(1)


def _configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


common_option_list = [
    click.option("--economy", "economy_path", type=click.Path(dir_okay=False), help="Economy JSON file"),
    click.option("--flows", "flows_path", type=click.Path(dir_okay=False), help="Equilibrium flow JSON file"),
    click.option("--demo", default=None, help="Use a built-in example instead of files (see `fixtures --list`)"),
    click.option("--out", "-o", "out", type=click.Path(dir_okay=False), help="Write output to this file"),
    click.option(
        "--format",
        "-f",
        "output_format",
        type=click.Choice([f.value for f in OutputFormat]),
        default=OutputFormat.TABLE.value,
        help="Output format",
    ),
    click.option(
        "--csv",
        "csv_path",
        is_flag=False,
        flag_value="-",
        default=None,
        help="Emit CSV, to stdout or to the given path",
    ),
    click.option("--tolerance", type=float, default=None, help="Residual tolerance (default PRODNET_TOLERANCE)"),
    click.option("--seed", type=int, default=0, show_default=True, help="Random seed"),
]

shock_options = [
    click.option("--shocked", required=True, help="Comma-separated shocked technology ids"),
    click.option("--lambda", "lam", type=float, required=True, help="Fraction of output retained"),
]


def _with(options: List[Callable]) -> Callable[[Callable], Callable]:
    def decorator(func: Callable) -> Callable:
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


common_options = _with(common_option_list)
with_shock = _with(shock_options)


def _load(economy_path: Optional[str], flows_path: Optional[str], demo: Optional[str]) -> Tuple[Economy, FlowState]:
    if demo is not None:
        return build(demo)
    if economy_path is None or flows_path is None:
        raise click.UsageError("--economy and --flows are required unless --demo is given")
    economy = load_economy(economy_path)
    return economy, load_flow_state(flows_path, economy)


def _shock(shocked: str, lam: float) -> ShockSpec:
    techs = [t.strip() for t in shocked.split(",") if t.strip()]
    if not techs:
        raise click.BadParameter("name at least one technology", param_hint="--shocked")
    return ShockSpec.of(techs, lam)


def _floats(text: str, flag: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=flag) from None


def _emit(results: Dict[str, Any], output_format: str, out: Optional[str], csv_path: Optional[str]) -> None:
    if csv_path is not None:
        output_format = OutputFormat.CSV.value
        if csv_path != "-":
            out = csv_path
    generator = ReportGenerator()
    text = generator.render(results, output_format)
    if out:
        generator.write(text, out)
    else:
        click.echo(text, nl=False)


@click.group(cls=ProdnetGroup)
@click.version_option(version=__version__, prog_name="prodnet")
@click.option("--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG logging on stderr")
def cli(verbose: int) -> None:
    """
    prodnet: supply disruptions in production networks

    Short-run propagation, medium-run rerouting, long-run re-equilibration,
    disruption centrality, inter-country power and supply-chain fragility.
    """
    load_dotenv()
    _configure_logging(verbose)


@cli.command()
@common_options
def validate(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed):
    """Check that the flow file is an equilibrium of the economy."""
    economy, state = _load(economy_path, flows_path, demo)
    violations = validate_equilibrium(economy, state, tolerance or get_settings().tolerance)
    results: Dict[str, Any] = {"valid": not violations, "violations": len(violations)}
    if violations:
        results["details"] = [v.model_dump() for v in violations]
    _emit(results, output_format, out, csv_path)
    if violations:
        click.get_current_context().exit(1)


@cli.command()
@common_options
def gdp(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed):
    """World GDP and GDP per country."""
    economy, state = _load(economy_path, flows_path, demo)
    analyzer = HultenAnalyzer(economy, state, tolerance=tolerance)
    by_country = country_gdp(economy, state)
    results = {
        "gdp": analyzer.network.gdp,
        "countries": [{"country": c, "gdp": v, "wage": state.wages.get(c, 0.0)} for c, v in by_country.items()],
    }
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@click.option("--tech", required=True, help="Technology id")
@click.option("--shock", "shock_size", type=float, default=0.1, show_default=True, help="Fraction of productivity lost")
def hulten(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, tech, shock_size):
    """Hulten statistic and first-order long-run loss for one technology."""
    economy, state = _load(economy_path, flows_path, demo)
    report = HultenAnalyzer(economy, state, tolerance=tolerance).hulten_marginal(tech, shock_size)
    row = {
        "tech": report.tech,
        "expenditure": report.expenditure,
        "gdp": report.gdp,
        "share": report.marginal_share,
        "loss": report.extrapolated_loss,
    }
    _emit({"hulten": [row]}, output_format, out, csv_path)


@cli.command()
@common_options
@with_shock
@click.option("--curve", default=None, help="Comma-separated lambdas: tabulate losses for one shocked technology")
def longrun(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, shocked, lam, curve):
    """Re-solve the equilibrium after a productivity shock."""
    economy, state = _load(economy_path, flows_path, demo)
    analyzer = HultenAnalyzer(economy, state, tolerance=tolerance)
    shock = _shock(shocked, lam)
    if curve is not None:
        if len(shock.shocked) != 1:
            raise click.BadParameter("--curve takes exactly one shocked technology", param_hint="--shocked")
        (tech,) = shock.shocked
        _emit({"curve": analyzer.long_run_loss_curve(tech, _floats(curve, "--curve"))}, output_format, out, csv_path)
        return
    outcome = analyzer.long_run_reequilibrate(shock)
    results = {
        "outputs": [
            {
                "tech": t,
                "output": outcome.flows.output(t),
                "price": outcome.flows.prices.get(t, 0.0),
            }
            for t in analyzer.network.tech_ids
        ],
        "gdp": outcome.baseline_gdp - outcome.lost_gdp_total,
        "baseline_gdp": outcome.baseline_gdp,
        "loss_fraction": outcome.loss_fraction,
    }
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@with_shock
@click.option("--delta", type=float, default=0.0, show_default=True, help="Stop sweeping at this output change")
def shock(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, shocked, lam, delta):
    """Short-run propagation under proportional rationing."""
    economy, state = _load(economy_path, flows_path, demo)
    config = PropagationConfig(delta=delta, max_sweeps=get_settings().max_sweeps)
    results = PropagationAnalyzer(economy, state, tolerance=tolerance).analyze(_shock(shocked, lam), config=config)
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@with_shock
def bound(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, shocked, lam):
    """Lost-GDP bound and the two conditions under which it is attained."""
    economy, state = _load(economy_path, flows_path, demo)
    analyzer = PropagationAnalyzer(economy, state, tolerance=tolerance)
    spec = _shock(shocked, lam)
    report = analyzer.shock_bound(spec)
    cut = analyzer.check_cut_condition(spec)
    results = {
        "bound_fraction": report.bound_fraction,
        "actual_fraction": report.actual_fraction,
        "tight": report.tight,
        "affected_finals": sorted(report.affected_finals),
        "cut_condition": cut.holds,
        "cycle": cut.cycle,
        "surviving_path": cut.surviving_path,
        "industry_shock_condition": analyzer.check_industry_shock_condition(spec),
    }
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@with_shock
def mediumrun(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, shocked, lam):
    """Value-maximizing rerouting with flexible prices."""
    economy, state = _load(economy_path, flows_path, demo)
    results = MediumRunAnalyzer(economy, state, tolerance=tolerance).analyze(_shock(shocked, lam))
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@with_shock
def lpr(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, shocked, lam):
    """Loss to price rigidity: short-run over medium-run lost output."""
    economy, state = _load(economy_path, flows_path, demo)
    report = MediumRunAnalyzer(economy, state, tolerance=tolerance).lpr(_shock(shocked, lam))
    _emit(report.model_dump(), output_format, out, csv_path)


@cli.command(name="gen-lpr")
@click.option("--t", "t", type=click.IntRange(min=2), required=True, help="Target loss to price rigidity")
@click.option("--out", "-o", "out", type=click.Path(file_okay=False), required=True, help="Output directory")
def gen_lpr(t, out):
    """Write an economy whose loss to price rigidity is t."""
    for path in emit(FixtureId.LPR_FAMILY, out, t):
        click.echo(str(path))


@cli.command()
@common_options
@click.option("--tech", default=None, help="One technology id")
@click.option("--all", "rank", is_flag=True, help="Rank every active technology")
@click.option("--lambda", "lam", type=float, default=None, help="Also report (1 - lambda) * dc")
def centrality(economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, tech, rank, lam):
    """Disruption centrality of one technology or of all of them."""
    if (tech is None) == (not rank):
        raise click.UsageError("give exactly one of --tech and --all")
    economy, state = _load(economy_path, flows_path, demo)
    results = CentralityAnalyzer(economy, state, tolerance=tolerance).analyze(tech=tech, lam=lam)
    _emit({"centrality": results["rows"]}, output_format, out, csv_path)


@cli.command()
@common_options
@click.option("--aggressor", default=None, help="Disrupting country")
@click.option("--target", default=None, help="Country being hurt")
@click.option("--strategic", is_flag=True, help="Let the target route its own cuts")
@click.option("--exhaustive", is_flag=True, help="Try every aggressor technology, not only border ones")
@click.option("--matrix", is_flag=True, help="Power for every ordered pair of countries")
def power(
    economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, aggressor, target, strategic,
    exhaustive, matrix,
):
    """Power of one country over another."""
    economy, state = _load(economy_path, flows_path, demo)
    analyzer = PowerAnalyzer(economy, state, tolerance=tolerance)
    if matrix:
        frame = analyzer.power_matrix(exhaustive=exhaustive)
        rows = [{"aggressor": a, **{t: frame.loc[a, t] for t in frame.columns}} for a in frame.index]
        _emit({"power": rows}, output_format, out, csv_path)
        return
    if aggressor is None or target is None:
        raise click.UsageError("--aggressor and --target are required unless --matrix is given")
    results = analyzer.analyze(aggressor=aggressor, target=target, strategic=strategic, exhaustive=exhaustive)
    _emit(results, output_format, out, csv_path)


@cli.command()
@common_options
@click.option("--aggressor", required=True, help="Disrupting country")
@click.option("--target", required=True, help="Country being hurt")
@click.option("--resolution", type=click.IntRange(min=2), default=None, help="Also sample this many evenly spaced points")
@click.option("--exhaustive", is_flag=True, help="Try every aggressor technology, not only border ones")
def frontier(
    economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, aggressor, target, resolution,
    exhaustive,
):
    """Disruption possibility frontier, as breakpoints in percent of GDP."""
    economy, state = _load(economy_path, flows_path, demo)
    result = PowerAnalyzer(economy, state, tolerance=tolerance).frontier(
        aggressor, target, resolution=resolution, exhaustive=exhaustive, progress=sys.stderr.isatty()
    )
    points = result.samples or result.points
    rows = [{"own_loss_pct": x, "target_loss_pct": y} for x, y in points]
    _emit({"frontier": rows}, output_format, out, csv_path)


@cli.command()
@common_options
@click.option("--pi", type=float, required=True, help="Disruption probability per intermediate technology")
@click.option("--lambda", "lam", type=float, required=True, help="Fraction of output retained when disrupted")
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True, help="Monte Carlo trials")
@click.option("--compare-formula", is_flag=True, help="Report the closed-form expected losses alongside")
@click.option("--configurations", is_flag=True, help="Run the vertical, horizontal and parallel examples instead")
def fragility(
    economy_path, flows_path, demo, out, output_format, csv_path, tolerance, seed, pi, lam, trials, compare_formula,
    configurations,
):
    """Expected GDP loss when intermediates fail independently with probability pi."""
    progress = sys.stderr.isatty()
    if configurations:
        rows = configuration_table(pi, lam, trials, seed, progress=progress)
        _emit({"configurations": rows}, output_format, out, csv_path)
        return
    economy, state = _load(economy_path, flows_path, demo)
    results = FragilityAnalyzer(economy, state, tolerance=tolerance).analyze(
        pi=pi, lam=lam, trials=trials, seed=seed, compare_formula=compare_formula, progress=progress
    )
    _emit(results, output_format, out, csv_path)


@cli.command()
@click.option("--list", "list_all", is_flag=True, help="List the built-in examples")
@click.option("--emit", "name", default=None, help="Example to write, e.g. Fig1Chain or LprFamily(4)")
@click.option("--out", "-o", "out", type=click.Path(file_okay=False), default=".", show_default=True, help="Output directory")
def fixtures(list_all, name, out):
    """List or write the built-in example economies."""
    if list_all == (name is not None):
        raise click.UsageError("give exactly one of --list and --emit")
    if list_all:
        for fixture in list_fixtures():
            click.echo(fixture)
        return
    for path in emit(name, out):
        click.echo(str(path))


def run(argv: Sequence[str]) -> int:
    """Run the CLI on ``argv`` and return its exit status."""
    try:
        cli.main(args=list(argv), prog_name="prodnet", standalone_mode=True)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main() -> None:
    """Main entry point for the CLI."""
    cli()
