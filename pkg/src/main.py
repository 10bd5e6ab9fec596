#!/usr/bin/env python3
"""
Main entry point for the cddp command line
"""

import io
import sys
from pathlib import Path
from typing import Optional, Sequence

# Set UTF-8 encoding for Windows console
if sys.platform == "win32":
    try:
        import ctypes
        # Enable ANSI escape codes on Windows 10+
        kernel32 = ctypes.windll.kernel32
        kernel32.SetConsoleMode(kernel32.GetStdHandle(-11), 7)
    except (OSError, AttributeError):
        pass
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8")


# Add src directory to path to enable imports
src_dir = Path(__file__).parent
sys.path.insert(0, str(src_dir))

from cli.commands import run_cli  # noqa: E402


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one cddp subcommand and return its exit code"""
    try:
        return run_cli(argv)
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
