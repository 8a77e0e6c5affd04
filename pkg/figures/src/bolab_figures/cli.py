"""Command line entry point: bolab-figures render-all --in DIR --out DIR."""

import argparse
import sys

from .render import render_all
from .schema import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bolab-figures",
        description="Render the standard figure set from bolab artifacts")
    parser.add_argument("command", choices=["render-all"])
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory with the CSV/JSON artifacts")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for the rendered figures")
    parser.add_argument("--format", dest="image_format", default="png",
                        choices=["png", "svg", "pdf"])
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        captions = render_all(args.in_dir, args.out_dir,
                              args.image_format)
    except SchemaError as exc:
        print("schema error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 2
    if not args.quiet:
        for name, caption in sorted(captions.items()):
            print("%s: %s" % (name, caption))
    return 0


if __name__ == "__main__":
    sys.exit(main())
