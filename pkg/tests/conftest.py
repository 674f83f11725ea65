import math
import re

from hypothesis import strategies as st

from squarehit.geometry import Square

coord = st.floats(-3.0, 3.0, allow_nan=False)
side = st.floats(0.2, 3.0, allow_nan=False)
angle = st.floats(0.0, math.pi / 2, allow_nan=False, exclude_max=True)


@st.composite
def squares(draw, unit: bool = False):
    return Square((draw(coord), draw(coord)), 1.0 if unit else draw(side), draw(angle))


# ------------------------------------------------------------------ acceptance report

CRITERIA = {
    1: "lower-bound families (tau 3 and tau 4 with nu 1)",
    2: "disjoint copies scale (3, 9) and (2, 8)",
    3: "greedy hitting within 6 nu and 10 nu",
    4: "neighbour hitter certificates",
    5: "patch lemma Monte-Carlo",
    6: "colouring bounds",
    7: "seven disjoint neighbours",
    8: "chain gadget forcing",
    9: "twelve-disk cover",
    10: "exact solvers agree with enumeration",
}
_outcomes: dict[int, list[tuple[str, bool]]] = {}


def _criterion(nodeid: str):
    m = re.search(r"test_acceptance\.py::test_c(\d\d)_", nodeid)
    return int(m.group(1)) if m else None


def pytest_runtest_logreport(report):
    k = _criterion(report.nodeid)
    if k is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(k, []).append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k, title in CRITERIA.items():
        runs = _outcomes.get(k)
        if not runs:
            continue
        status = "PASS" if all(ok for _, ok in runs) else "FAIL"
        failed = [name for name, ok in runs if not ok]
        tail = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {title}{tail}")
