#!/usr/bin/env python3
"""
Launcher for the C-function toolkit: loads .env, prints a banner to
stderr and hands the arguments to the command line
"""
import os
import sys

from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def main():
    try:
        from cfunc import __version__
        from cfunc.cli import cli
    except ImportError as e:
        print(f"Error importing cfunc: {e}", file=sys.stderr)
        print("Install requirements.txt and run from the project root", file=sys.stderr)
        sys.exit(1)

    load_dotenv()

    console = Console(stderr=True)
    if len(sys.argv) == 1:
        console.print(Panel.fit(
            f"C-function toolkit v{__version__}\n"
            "Try: run_toolkit.py --format table solve --d 7\n"
            "     run_toolkit.py verify --level fast",
            style="bold green",
        ))
    cli(prog_name="run_toolkit.py")


if __name__ == "__main__":
    main()
