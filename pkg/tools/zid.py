#!/usr/bin/env python3
"""Command-line entry point for a source checkout.

    tools/zid.py tests/graphs/g_a.txt -y Y=1 -x X=1 -z Z --verify-n 20
"""

import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "plugins"))

from module_utils.cli import main  # noqa: E402  pylint: disable=wrong-import-position

if __name__ == "__main__":
    sys.exit(main())
