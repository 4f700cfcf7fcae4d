import sys
from . import EXIT_SUCCESS, EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR
from ..experiment import ConfigError, ExperimentSummary, compare_report, write_report_csv
from ..error import InputError


def compare(paths, baseline=None, csv_path=None):
    try:
        summaries = [ExperimentSummary.read(p) for p in paths]
    except ConfigError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        table, rows = compare_report(summaries, baseline)
    except InputError as e:
        print("Error: {}".format(e), file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    print(table, end="")
    if csv_path is not None:
        write_report_csv(csv_path, rows)
    return EXIT_SUCCESS


class Command:
    """Compare algorithms of experiment summaries.
    """

    @staticmethod
    def add_arguments(parser):
        func = parser.add_argument
        func("summaries", nargs="+", metavar="summary", help="summary.json files")
        func("--baseline", type=str, metavar="label", help="row the differences refer to")
        func("--csv", type=str, metavar="file", help="also write the table as CSV")

    @staticmethod
    def run(args, parser):
        return compare(args.summaries, args.baseline, args.csv)
