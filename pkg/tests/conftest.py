import shutil
from pathlib import Path

import pytest

from lcburden import load_bundle, run_model

ROOT = Path(__file__).resolve().parents[1]
BUNDLE = ROOT / "data" / "argentina-2023"

# criterion number -> (description, [(part, passed, detail)]); filled by
# tests/test_acceptance.py and printed at the end of the session
ACCEPTANCE: dict[int, tuple[str, list]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "property: hypothesis property suites")


def acceptance_lines() -> list[str]:
    lines = []
    for number in sorted(ACCEPTANCE):
        description, parts = ACCEPTANCE[number]
        failed = [f"{part}: {detail}" for part, ok, detail in parts if not ok]
        verdict = "FAIL" if failed else "PASS"
        checks = f"{len(parts)} check" + ("s" if len(parts) != 1 else "")
        line = f"criterion {number:>2}: {verdict}  {description} ({checks})"
        if failed:
            line += " | failing " + "; ".join(failed)
        lines.append(line)
    return lines


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines():
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bundle_path():
    return BUNDLE


@pytest.fixture(scope="session")
def bundle():
    return load_bundle(BUNDLE)


@pytest.fixture(scope="session")
def result(bundle):
    return run_model(bundle)


@pytest.fixture
def bundle_copy(tmp_path):
    """A writable copy of the shipped bundle."""
    target = tmp_path / "bundle"
    shutil.copytree(BUNDLE, target)
    return target


def edit_csv(path: Path, old: str, new: str) -> None:
    text = path.read_text(encoding="utf-8")
    assert old in text, f"{old!r} not in {path.name}"
    path.write_text(text.replace(old, new, 1), encoding="utf-8")
