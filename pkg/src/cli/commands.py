"""
cli/commands.py
Subcommands of the cddp command line

Each subcommand is a Command registered in a CommandRegistry; the
registry builds the argparse parser and dispatches to Command.execute.
"""
import argparse
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from dotenv import load_dotenv

from core.model import load_design, load_instance, save_design, save_instance
from core.progress import timed
from core.utils.config import get_config_manager, get_operational_config, reset_config_manager
from core.utils.exceptions import (
    ExceptionHandler,
    InvalidInstanceError,
    ParameterError,
    SearchSpaceTooLargeError,
    handle_errors,
)
from core.utils.logging import get_logger
from .report import (
    BOUND_COLUMNS,
    DIMS_COLUMNS,
    FORMATS,
    INSTANCE_COLUMNS,
    SOLVE_COLUMNS,
    render,
    solve_row,
    write_rows,
)


class Command(ABC):
    """Abstract base class for all commands"""

    def __init__(self, name: str, description: str, aliases: Sequence[str] = ()):
        self.name = name
        self.description = description
        self.aliases = tuple(aliases)

    @abstractmethod
    def configure(self, parser: argparse.ArgumentParser) -> None:
        """Declare the command's arguments"""

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> int:
        """Run the command; returns the exit code"""

    def __str__(self):
        return f"{self.name}: {self.description}"


class CommandRegistry:
    """Registry for managing available commands"""

    def __init__(self):
        self._commands: Dict[str, Command] = {}
        self._aliases: Dict[str, str] = {}

    def register(self, command: Command):
        """Register a command"""
        self._commands[command.name.lower()] = command
        for alias in command.aliases:
            self._aliases[alias.lower()] = command.name.lower()

    def get(self, name: str) -> Optional[Command]:
        """Get a command by name or alias"""
        key = name.lower()
        return self._commands.get(self._aliases.get(key, key))

    def list_commands(self) -> List[Command]:
        """List all available commands"""
        return list(self._commands.values())

    def has_command(self, name: str) -> bool:
        """Check if command exists"""
        return self.get(name) is not None

    def execute_command(self, name: str, args: argparse.Namespace) -> int:
        """Execute a command by name"""
        command = self.get(name)
        if not command:
            raise ParameterError("command", name, f"one of {sorted(self._commands)}")
        return command.execute(args)

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--format", choices=FORMATS, default=None,
                            help="Terminal output format (default from config)")
        common.add_argument("--jobs", type=int, default=None, help="Worker processes for submodel solves")
        common.add_argument("--log-level", default=None,
                            choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging verbosity")
        common.add_argument("--config", default=None, help="YAML or JSON configuration file")
        common.add_argument("--no-color", action="store_true", help="Disable coloured output")

        parser = argparse.ArgumentParser(
            prog="cddp",
            description="Cross-dock door design under uncertainty: instances, models, bounds and the matheuristic",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  %(prog)s generate --nodes 8 --doors 4 --seed 7 --out i1.json
  %(prog)s merge i1.json i2.json --out i3.json
  %(prog)s dims i1.json --kappa 2
  %(prog)s bounds i1.json --option 2 --kappa 2
  %(prog)s scs4b i1.json --kappa 2 --rho 0 --report i1.csv
  %(prog)s oracle tiny.json
            """)
        subparsers = parser.add_subparsers(dest="command", help="Available commands")
        for command in self.list_commands():
            sub = subparsers.add_parser(command.name, aliases=list(command.aliases),
                                        help=command.description, parents=[common])
            command.configure(sub)
        return parser


def _seed(args: argparse.Namespace) -> int:
    """--seed, else $CDDP_SEED, else 0"""
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("CDDP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ParameterError("CDDP_SEED", env, "integer")


def _format(args: argparse.Namespace) -> str:
    return args.format or get_operational_config().report_format


def _emit(args: argparse.Namespace, rows, columns, title: str) -> None:
    print(render(rows, columns, _format(args), title=title), end="")


class GenerateCommand(Command):
    def __init__(self):
        super().__init__("generate", "Generate a BSC instance")

    def configure(self, parser):
        parser.add_argument("--nodes", type=int, required=True, help="Origins = destinations per scenario")
        parser.add_argument("--doors", type=int, required=True, help="Strip = stack doors")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--slack", type=int, nargs="+", default=None, help="Slack percentages, one scenario each")
        parser.add_argument("--density", type=float, default=None)
        parser.add_argument("--flow-range", type=int, nargs=2, default=None, metavar=("LOW", "HIGH"))
        parser.add_argument("--levels", type=int, default=None, help="Capacity levels per door")
        parser.add_argument("--name", default="")
        parser.add_argument("--out", required=True, help="Instance JSON file")

    def execute(self, args):
        from modules.testbed import BscSpec, generate_bsc

        options = {"slack_set": args.slack, "density": args.density,
                   "flow_range": args.flow_range, "n_levels": args.levels}
        try:
            spec = BscSpec(args.nodes, args.doors, seed=_seed(args), name=args.name,
                           **{k: v for k, v in options.items() if v is not None})
        except InvalidInstanceError as error:
            raise ParameterError("generate", args.nodes, error.message)
        instance = generate_bsc(spec)
        save_instance(instance, args.out)
        _emit(args, [_instance_row(instance)], INSTANCE_COLUMNS, "instance")
        return 0


class MergeCommand(Command):
    def __init__(self):
        super().__init__("merge", "Merge BSC instances into one stochastic instance")

    def configure(self, parser):
        parser.add_argument("inputs", nargs="+", help="Member instance files")
        parser.add_argument("--levels", type=int, default=None, help="Capacity levels (default: the members')")
        parser.add_argument("--name", default="")
        parser.add_argument("--out", required=True, help="Merged instance JSON file")

    def execute(self, args):
        from modules.testbed import MergeSpec, merge_bsc

        members = [load_instance(path) for path in args.inputs]
        levels = args.levels or members[0].strip_doors[0].n_levels
        instance = merge_bsc(MergeSpec(n_levels=levels, name=args.name), members)
        save_instance(instance, args.out)
        _emit(args, [_instance_row(instance)], INSTANCE_COLUMNS, "instance")
        return 0


def _instance_row(instance) -> Dict[str, object]:
    from modules.testbed import table1_row

    n_scen, n_strip, n_stack, origins, destinations = table1_row(instance)
    return {"inst": instance.name, "n_scen": n_scen, "n_strip": n_strip, "n_stack": n_stack,
            "origins": origins, "destinations": destinations}


class DimsCommand(Command):
    def __init__(self):
        super().__init__("dims", "Dimensions of the linearized model")

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--kappa", type=int, default=None, help="Also report the largest cluster submodel")
        parser.add_argument("--seed", type=int, default=None)

    def execute(self, args):
        from modules.decomposition import build_c_submodel, generate_clusters
        from modules.lip import build_lip, count_dims

        instance = load_instance(args.instance)
        rows = [_dims_row(instance.name, "lip", count_dims(build_lip(instance)))]
        if args.kappa is not None:
            clusters = generate_clusters(instance, args.kappa, _seed(args))
            largest = clusters.largest()
            rows.append(_dims_row(instance.name, f"cluster {largest.label} (kappa={args.kappa})",
                                  count_dims(build_c_submodel(instance, largest))))
        _emit(args, rows, DIMS_COLUMNS, "dims")
        return 0


def _dims_row(name: str, model: str, dims) -> Dict[str, object]:
    rows, binaries, continuous, nonzeros = dims.as_row()
    return {"inst": name, "model": model, "rows": rows, "binaries": binaries,
            "continuous": continuous, "nonzeros": nonzeros}


class ExportLipCommand(Command):
    def __init__(self):
        super().__init__("export-lip", "Write the linearized model as LP (or MPS) text")

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--out", required=True, help="Target file; .mps selects MPS")
        parser.add_argument("--mps", action="store_true", help="Force MPS output")

    def execute(self, args):
        from modules.lip import build_lip, count_dims, write_lp, write_mps

        instance = load_instance(args.instance)
        milp = build_lip(instance)
        if args.mps or Path(args.out).suffix.lower() == ".mps":
            write_mps(milp, args.out)
        else:
            write_lp(milp, args.out)
        _emit(args, [_dims_row(instance.name, Path(args.out).name, count_dims(milp))], DIMS_COLUMNS, "export")
        return 0


class BoundsCommand(Command):
    def __init__(self):
        super().__init__("bounds", "Scenario-cluster lower bound")

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--option", type=int, choices=[1, 2], default=1)
        parser.add_argument("--kappa", type=int, default=None)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--time-limit", type=float, default=None, help="Seconds per submodel")

    def execute(self, args):
        from core.utils.config import get_algorithm_config
        from modules.decomposition import generate_clusters, solve_cluster_bounds
        from core.utils.exceptions import InvalidBoundError

        instance = load_instance(args.instance)
        kappa = args.kappa if args.kappa is not None else get_algorithm_config().kappa
        clusters = generate_clusters(instance, kappa, _seed(args))
        result = solve_cluster_bounds(instance, clusters, args.option, args.time_limit, args.jobs,
                                      progress=_format(args) == "pretty")
        rows = []
        for cluster in clusters:
            entries = result.entries[cluster.id]
            status = "optimal" if all(e.proven for e in entries) else entries[0].result.status.value
            rows.append({"inst": instance.name, "option": args.option, "cluster": cluster.label,
                         "scenarios": " ".join(str(w) for w in cluster.scenarios),
                         "weight": cluster.weight, "value": result.cluster_value(cluster.id),
                         "status": status, "seconds": sum(e.result.seconds for e in entries)})
        try:
            aggregate, status = result.value, "optimal" if result.proven else "bound-only"
        except InvalidBoundError:
            aggregate, status = None, "invalid"
        rows.append({"inst": instance.name, "option": args.option, "cluster": "all",
                     "scenarios": str(instance.n_scenarios), "weight": 1.0, "value": aggregate,
                     "status": status, "seconds": result.seconds})
        _emit(args, rows, BOUND_COLUMNS, "bounds")
        return 0


class Scs4bCommand(Command):
    def __init__(self):
        super().__init__("scs4b", "Run the scenario-cluster matheuristic", aliases=["solve"])

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--kappa", type=int, default=None)
        parser.add_argument("--rho", type=float, default=None)
        parser.add_argument("--delta", type=int, default=None)
        parser.add_argument("--option", choices=["1", "2", "both", "none"], default=None,
                            help="Which lower bounds to compute")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--time-limit", type=float, default=None, help="Seconds per submodel")
        parser.add_argument("--escalation", choices=["textual", "literal"], default=None)
        parser.add_argument("--basic-capacity", choices=["fallback", "always"], default=None)
        parser.add_argument("--step0-option", type=int, choices=[1, 2], default=None)
        parser.add_argument("--reference-value", type=float, default=None, help="Reference incumbent for GR")
        parser.add_argument("--oracle", action="store_true", help="Also solve exhaustively (tiny instances)")
        parser.add_argument("--report", default=None, help="CSV report file")
        parser.add_argument("--design-out", default=None, help="Write the incumbent design as JSON")

    def execute(self, args):
        from modules.scs4b import Scs4bParams, run
        from modules.solvers import brute_force_oracle

        instance = load_instance(args.instance)
        params = Scs4bParams.from_config(
            kappa=args.kappa, seed=_seed(args), rho=args.rho, delta=args.delta,
            bound_option=args.option, time_limit=args.time_limit, escalation=args.escalation,
            basic_capacity=args.basic_capacity, step0_option=args.step0_option, jobs=args.jobs)
        report = run(instance, params, reference_value=args.reference_value)
        if args.oracle:
            oracle, error = ExceptionHandler.safe_execute(brute_force_oracle, report.instance)
            if isinstance(error, SearchSpaceTooLargeError):
                get_logger().warning(error.message)
            elif error is not None:
                raise error
            else:
                report.oracle_value = oracle.value
        rows = [solve_row(report, instance.name)]
        if args.report:
            write_rows(args.report, rows, SOLVE_COLUMNS)
        if args.design_out and report.design is not None:
            save_design(report.design, args.design_out)
        _emit(args, rows, SOLVE_COLUMNS, "SCS4B")
        return 0


class OracleCommand(Command):
    def __init__(self):
        super().__init__("oracle", "Exact optimum of a tiny instance")

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--method", choices=["enumerate", "bq-bb", "lip"], default="enumerate")
        parser.add_argument("--max-leaves", type=float, default=None)
        parser.add_argument("--time-limit", type=float, default=None)
        parser.add_argument("--design-out", default=None, help="Write the optimal design as JSON")

    def execute(self, args):
        from modules.lip import build_lip, design_from_vector
        from modules.solvers import brute_force_oracle, solve_bb, solve_bq_bb

        instance = load_instance(args.instance)
        with timed(f"oracle {args.method}", get_logger().info):
            if args.method == "enumerate":
                result = brute_force_oracle(instance, args.max_leaves)
                design = result.design
            elif args.method == "bq-bb":
                result = solve_bq_bb(instance, time_limit=args.time_limit)
                design = result.design
            else:
                milp = build_lip(instance)
                result = solve_bb(milp, time_limit=args.time_limit)
                design = design_from_vector(milp, result.solution) if result.solution is not None else None
        if args.design_out and design is not None:
            save_design(design, args.design_out)
        row = {"inst": instance.name, "method": args.method, "status": result.status.value,
               "value": result.value, "bound": result.bound, "nodes": result.nodes,
               "seconds": result.seconds, "design": design.describe() if design is not None else ""}
        _emit(args, [row], tuple(row), "oracle")
        return 0


class SolveOmegaCommand(Command):
    def __init__(self):
        super().__init__("solve-omega", "Solve one scenario with a fixed design")

    def configure(self, parser):
        parser.add_argument("instance")
        parser.add_argument("--scenario", type=int, required=True, help="0-based scenario index")
        parser.add_argument("--design", required=True, help="Design JSON file")
        parser.add_argument("--method", choices=["auto", "exact", "lsh"], default="auto")
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--basic-capacity", action="store_true",
                            help="Give doors without a level their basic capacity")

    def execute(self, args):
        from modules.solvers import OmegaSubmodel, solve_omega, solve_omega_exact, solve_omega_lsh

        instance = load_instance(args.instance)
        if not 0 <= args.scenario < instance.n_scenarios:
            raise ParameterError("--scenario", args.scenario, f"0..{instance.n_scenarios - 1}")
        design = load_design(args.design)
        if args.basic_capacity:
            design = design.with_basic_capacities(instance)
        sub = OmegaSubmodel.from_design(instance, args.scenario, design)
        seed = _seed(args)
        if args.method == "exact":
            result = solve_omega_exact(sub, seed=seed)
        elif args.method == "lsh":
            result = solve_omega_lsh(sub, seed=seed)
        else:
            result = solve_omega(sub, seed=seed)
        assignment = result.assignment
        row = {"inst": instance.name, "scenario": args.scenario, "status": result.status.value,
               "value": result.value, "bound": result.bound, "out": assignment.out,
               "x": " ".join(str(d) for d in assignment.x), "y": " ".join(str(d) for d in assignment.y)}
        _emit(args, [row], tuple(row), "omega")
        return 0


def default_registry() -> CommandRegistry:
    registry = CommandRegistry()
    for command in (GenerateCommand(), MergeCommand(), DimsCommand(), ExportLipCommand(),
                    BoundsCommand(), Scs4bCommand(), OracleCommand(), SolveOmegaCommand()):
        registry.register(command)
    return registry


def _apply_globals(args: argparse.Namespace) -> None:
    if getattr(args, "config", None):
        reset_config_manager(args.config)
    manager = get_config_manager()
    if getattr(args, "no_color", False):
        manager.set_setting("operational", "enable_color_output", False)
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise ParameterError("--jobs", args.jobs, "integer >= 1")
        manager.set_setting("solver", "jobs", args.jobs)
    get_logger().set_level(getattr(args, "log_level", None) or get_operational_config().log_level)


@handle_errors()
def _dispatch(registry: CommandRegistry, args: argparse.Namespace) -> int:
    _apply_globals(args)
    return registry.execute_command(args.command, args)


def run_cli(argv: Optional[Sequence[str]] = None, registry: Optional[CommandRegistry] = None) -> int:
    """Parse and run; returns 0, 2 (usage), 3 (data) or 1"""
    load_dotenv()
    registry = registry or default_registry()
    parser = registry.build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    if not args.command:
        parser.print_help()
        return 2
    return _dispatch(registry, args)
