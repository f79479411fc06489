"""Tests for the runtime requirement checks."""

import pytest

from ansible_collections.causal.zid.plugins.module_utils import version_check


@pytest.mark.parametrize(
    "text, expected",
    [("1.24.3", (1, 24, 3)), ("3.1", (3, 1)), ("2.0.0rc1", (2, 0, 0)), ("1.26.0.post1", (1, 26, 0)), ("dev", (0,))],
)
def test_parse_version(text, expected):
    assert version_check.parse_version(text) == expected


def test_old_python_rejected():
    with pytest.raises(RuntimeError, match="requires Python >= 3.11"):
        version_check.check_python_version((3, 10, 12))


def test_current_python_accepted():
    assert version_check.check_python_version((3, 12, 1)) == (3, 12, 1)


def test_installed_package():
    result = version_check.check_package_version("numpy", "1.0")
    assert result["installed"]
    assert result["satisfied"]
    assert result["error"] is None


def test_missing_package():
    result = version_check.check_package_version("no-such-package-zid", "1.0")
    assert not result["installed"]
    assert "not installed" in result["error"]


def test_outdated_package():
    result = version_check.check_package_version("numpy", "999.0")
    assert result["installed"]
    assert not result["satisfied"]
    assert ">= 999.0 is required" in result["error"]


def test_all_requirements(mocker):
    mocker.patch.object(version_check, "REQUIRED_PACKAGES", {"numpy": "1.0", "no-such-package-zid": "1.0"})
    with pytest.raises(RuntimeError) as excinfo:
        version_check.check_all_requirements()
    assert "no-such-package-zid" in str(excinfo.value)
    assert "numpy" not in str(excinfo.value)


def test_all_requirements_satisfied(mocker):
    mocker.patch.object(version_check, "REQUIRED_PACKAGES", {"numpy": "1.0"})
    report = version_check.check_all_requirements()
    assert report["all_satisfied"]
    assert report["packages"]["numpy"]["satisfied"]
