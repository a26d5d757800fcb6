import itertools

import pytest
from hypothesis import settings

from oddforms import kernels
from oddforms.forms import FormSystem, parse_system

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def system(text: str, names: str | None = None) -> FormSystem:
    """Parse a system given as ``;``-separated ``deg: poly`` entries or raw file text."""
    if "form" not in text:
        lines = []
        for part in text.split(";"):
            deg, poly = part.split(":", 1)
            lines.append(f"form deg={deg.strip()}: {poly.strip()}")
        text = "\n".join(lines)
    if names:
        text = f"vars: {names}\n" + text
    return parse_system(text)


def brute_zeros(sys: FormSystem, p: int, units_only=False):
    """All zeros in F_p^s by plain itertools enumeration (oracle)."""
    rng = range(1, p) if units_only else range(p)
    for x in itertools.product(rng, repeat=sys.s):
        if all(f.evaluate(x, p) == 0 for f in sys.forms):
            yield x


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    with kernels.use_backend(request.param):
        yield request.param


# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
