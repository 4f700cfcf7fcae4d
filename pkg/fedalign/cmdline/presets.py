import json
from . import EXIT_SUCCESS
from ..experiment.presets import PRESETS, preset_names
from ..utils import split_string


def list_presets():
    for name in preset_names():
        print(name)
        print(split_string(PRESETS[name]["description"], length=80, starter="   "), end="")


def show_preset(name):
    print(json.dumps(PRESETS[name]["config"], indent=2, sort_keys=True))


class Command:
    """List or show the shipped config presets.
    """

    @staticmethod
    def add_arguments(parser):
        func = parser.add_argument
        func("action", choices=["list", "show"], help="list presets or show one")
        func("name", nargs="?", help="preset to show")

    @staticmethod
    def run(args, parser):
        if args.action == "list":
            list_presets()
            return EXIT_SUCCESS
        if args.name is None:
            parser.error('"show" needs a preset name')
        if args.name not in PRESETS:
            parser.error(
                'unknown preset "{}"; valid ones are: {}'.format(
                    args.name, ", ".join(preset_names())
                )
            )
        show_preset(args.name)
        return EXIT_SUCCESS
