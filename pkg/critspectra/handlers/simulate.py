"""`critspectra simulate`: record a Metropolis run to a binary dump."""

import argparse
import logging

from critspectra.constants import EXIT_OK
from critspectra.handlers.common import RunContext, load_simulation, output_argument
from critspectra.services.ising import check_capacity, mean_bond_product, simulate
from critspectra.storage import write_series_csv, write_time_series

logger = logging.getLogger(__name__)

SERIES_FILE = "series.csts"


def simulate_command(args: argparse.Namespace) -> int:
    """Simulate the [simulation] section of a run config."""
    _, config = load_simulation(args.config)
    check_capacity(config)
    run = RunContext.open(args, "simulate", config.seed, simulation=config)

    series = simulate(config)
    elapsed = run.elapsed()
    total_steps = config.equilibration_steps + config.tau
    steps_per_second = total_steps / elapsed if elapsed > 0 else 0.0

    meta = {
        "beta2j": repr(config.beta2j),
        "lattice_size": config.lattice_size,
        "tau": config.tau,
    }
    with run.output.artifact(SERIES_FILE, binary=True, model="ISING", meta=meta) as handle:
        write_time_series(handle, series)
    if args.csv:
        with run.output.artifact("series.csv", model="ISING", meta=meta) as handle:
            write_series_csv(handle, series)

    bond = mean_bond_product(series)
    run.finish({"steps_per_second": steps_per_second, "mean_bond_product": bond})
    logger.info(
        "Simulate done L=%d tau=%d steps_per_second=%.1f mean_bond_product=%.4f",
        config.lattice_size,
        config.tau,
        steps_per_second,
        bond,
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="run the Ising simulation of a config file")
    parser.add_argument("config", help="run config with a [simulation] section")
    parser.add_argument("--csv", action="store_true", help="also export one CSV row per site")
    output_argument(parser)
    parser.set_defaults(handler=simulate_command)
