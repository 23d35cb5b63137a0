"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""

from __future__ import annotations

import pytest

_RESULTS: dict[int, list[tuple[str, bool, str]]] = {}
_TITLES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """``record(number, title, part, passed, detail)``: log one checked part of a criterion."""

    def record(number: int, title: str, part: str, passed: bool, detail: str) -> bool:
        _TITLES[number] = title
        _RESULTS.setdefault(number, []).append((part, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} [{number}] {title} / {part}: {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        ok = all(p for _, p, _ in parts)
        failed = [f"{name} ({detail})" for name, p, detail in parts if not p]
        detail = "; ".join(f"{name}: {d}" for name, _, d in parts) if ok else "failed: " + "; ".join(failed)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{number}] {_TITLES[number]} -- {detail}")
