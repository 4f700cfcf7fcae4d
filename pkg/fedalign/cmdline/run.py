import logging
import sys
from . import EXIT_SUCCESS, EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR
from ..experiment import ConfigError, parse_config, run_experiment

logger = logging.getLogger(__name__)


def run(path, seed=None, output_dir=None, no_diagnostics=False, nprocs=None):
    r"""Run the experiment of config file ``path``; return the exit code."""
    try:
        cfg = parse_config(path)
    except ConfigError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG_ERROR

    cfg.override(
        seeds=None if seed is None else [seed],
        output_dir=output_dir,
        diagnostics=False if no_diagnostics else None,
        nprocs=nprocs,
    )
    try:
        run_experiment(cfg)
    except ConfigError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.exception("Experiment failed.")
        print("Error: {}: {}".format(type(e).__name__, e), file=sys.stderr)
        return EXIT_RUNTIME_ERROR
    return EXIT_SUCCESS


class Command:
    """Run an experiment from a config file.
    """

    @staticmethod
    def add_arguments(parser):
        func = parser.add_argument
        func("config", type=str, help="experiment config file (JSON)")
        func(
            "--seed-override",
            type=int,
            metavar="seed",
            help="run only this seed instead of the seeds of the config",
        )
        func("--output-dir", type=str, metavar="dir", help="directory of the outputs")
        func(
            "--no-diagnostics",
            action="store_true",
            help="skip oracles and convergence-bound diagnostics",
        )
        func("--nprocs", type=int, metavar="n", help="number of worker processes")

    @staticmethod
    def run(args, parser):
        return run(
            args.config,
            seed=args.seed_override,
            output_dir=args.output_dir,
            no_diagnostics=args.no_diagnostics,
            nprocs=args.nprocs,
        )
