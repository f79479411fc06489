# Copyright: (c) 2026, causal.zid contributors
# BSD 3-Clause License (see LICENSE or
# https://opensource.org/licenses/BSD-3-Clause)

"""Runtime checks of the interpreter and the numeric stack.

The Ansible modules and the command-line entry point call
:func:`check_all_requirements` before importing the engine so that a missing
or outdated package surfaces as one readable error instead of an import
traceback from deep inside the engine.
"""

import logging
import sys
from importlib import metadata

logger = logging.getLogger(__name__)


# ============================================================================
# Version Constraints (mirrors requirements.txt)
# ============================================================================

PYTHON_MIN_VERSION = (3, 11)
REQUIRED_PACKAGES = {
    "networkx": "3.1",
    "numpy": "1.24.0",
    "scipy": "1.10.0",
}


def parse_version(version_string):
    """``"1.24.3"`` -> ``(1, 24, 3)``; suffixes such as ``rc1`` are dropped."""
    parts = []
    for piece in str(version_string).split(".")[:3]:
        digits = ""
        for char in piece:
            if not char.isdigit():
                break
            digits += char
        if not digits:
            break
        parts.append(int(digits))
    return tuple(parts) or (0,)


def check_python_version(current=None):
    """Raise RuntimeError when the interpreter is older than 3.11."""
    current = tuple(current or sys.version_info[:3])
    if current[:2] < PYTHON_MIN_VERSION:
        wanted = "{0}.{1}".format(*PYTHON_MIN_VERSION)
        raise RuntimeError(
            "causal.zid requires Python >= {0}, but this is {1}\n\n"
            "Troubleshooting:\n"
            "  1. Check your Python version: python --version\n"
            "  2. Activate the correct virtual environment\n"
            "  3. Point Ansible at a newer interpreter:\n"
            "     ansible-playbook playbook.yml -e ansible_python_interpreter=/path/to/python{0}".format(
                wanted, ".".join(str(p) for p in current)
            )
        )
    return current


def check_package_version(package_name, required_version_str):
    """Compare the installed distribution against its minimum version.

    Returns:
        dict: ``installed``, ``current_version``, ``required_version``,
        ``satisfied`` and ``error`` (None when satisfied).
    """
    result = {
        "installed": False,
        "current_version": None,
        "required_version": required_version_str,
        "satisfied": False,
        "error": None,
    }
    try:
        current = metadata.version(package_name)
    except metadata.PackageNotFoundError:
        result["error"] = "package '{0}' is not installed (required: >= {1})".format(
            package_name, required_version_str
        )
        return result

    result["installed"] = True
    result["current_version"] = current
    if parse_version(current) < parse_version(required_version_str):
        result["error"] = "package '{0}' {1} is installed, but >= {2} is required".format(
            package_name, current, required_version_str
        )
        return result
    result["satisfied"] = True
    logger.debug("%s %s >= %s", package_name, current, required_version_str)
    return result


def check_all_requirements():
    """Validate the interpreter and every package in ``REQUIRED_PACKAGES``.

    Raises:
        RuntimeError: Listing every unmet requirement.
    """
    python = check_python_version()
    packages = {name: check_package_version(name, version) for name, version in REQUIRED_PACKAGES.items()}
    failed = [r["error"] for r in packages.values() if not r["satisfied"]]
    if failed:
        lines = ["causal.zid requirement validation failed:", ""]
        lines += ["  x {0}".format(err) for err in failed]
        lines += [
            "",
            "Troubleshooting:",
            "  1. Install the runtime requirements: pip install -r requirements.txt",
            "  2. In development: pip install -r requirements-dev.txt",
            "  3. Make sure Ansible runs the interpreter those packages live in",
        ]
        raise RuntimeError("\n".join(lines))
    return {"python": ".".join(str(p) for p in python), "packages": packages, "all_satisfied": True}
