import logging
import os
import sys
from . import EXIT_SUCCESS, EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR
from ..dataset import write_dataset
from ..experiment import ConfigError, parse_config, build_data
from ..log import log_entry

logger = logging.getLogger(__name__)


def export_dataset(config, target, seed=None):
    r"""Write the client datasets and test sets of ``config`` as CSV files in ``target``.

    Files are ``client<k>.csv`` (with a ``_priority`` suffix for priority clients),
    ``test.csv`` and, if present, ``client<k>_test.csv``.
    """
    cfg = parse_config(config)
    if seed is None:
        seed = cfg.seeds[0]
    data = build_data(cfg, seed)
    os.makedirs(target, exist_ok=True)

    for c in data.clients:
        name = "client{}{}.csv".format(c.id, "_priority" if c.is_priority else "")
        write_dataset(os.path.join(target, name), c.dataset)
    write_dataset(os.path.join(target, "test.csv"), data.test_set)
    if data.client_test_sets is not None:
        for k, ts in enumerate(data.client_test_sets):
            write_dataset(os.path.join(target, "client{}_test.csv".format(k)), ts)
    log_entry(
        logger,
        'Exported {} clients of seed {} to "{}".'.format(len(data.clients), seed, target),
        level="info",
    )


class Command:
    """Utility to inspect the datasets of an experiment.
    """

    @staticmethod
    def add_arguments(parser):
        func = parser.add_argument
        func(
            "-e",
            "--export",
            nargs=2,
            metavar=("<config>", "<output>"),
            help="export the generated client datasets to CSV files",
        )
        func("--seed", type=int, metavar="seed", help="seed of the data (default: first)")

    @staticmethod
    def run(args, parser):
        if args.export is None:
            parser.print_help()
            return EXIT_SUCCESS
        config, target = args.export
        try:
            export_dataset(config, target, args.seed)
        except ConfigError as e:
            print(e, file=sys.stderr)
            return EXIT_CONFIG_ERROR
        except Exception as e:
            logger.exception("Dataset export failed.")
            print("Error: {}: {}".format(type(e).__name__, e), file=sys.stderr)
            return EXIT_RUNTIME_ERROR
        return EXIT_SUCCESS
