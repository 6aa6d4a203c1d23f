from __future__ import annotations

import pytest

# criterion number -> list of (part, passed, detail)
_ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


class Criterion:
    def __init__(self, number: int, part: str):
        self.number, self.part = number, part
        self.detail = ""
        _ACCEPTANCE.setdefault(number, []).append((part, False, "not reached"))
        self._slot = len(_ACCEPTANCE[number]) - 1

    def note(self, detail: str) -> None:
        self.detail = detail
        self._set(False, detail)

    def ok(self, detail: str | None = None) -> None:
        self._set(True, self.detail if detail is None else detail)

    def _set(self, passed: bool, detail: str) -> None:
        _ACCEPTANCE[self.number][self._slot] = (self.part, passed, detail)


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[num]
        verdict = "PASS" if all(p for _, p, _ in parts) else "FAIL"
        detail = "; ".join(f"{name}: {'ok' if p else 'FAILED'}{' (' + d + ')' if d else ''}"
                           for name, p, d in parts)
        tr.write_line(f"criterion {num:2d}: {verdict}  {detail}")
