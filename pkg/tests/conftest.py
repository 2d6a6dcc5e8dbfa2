import numpy as np
import pytest

from boolhyper.boolfn import TruthTable, identity_table
from boolhyper.netgen import BooleanNetwork

AND = TruthTable(2, [0, 0, 0, 1])
OR = TruthTable(2, [0, 1, 1, 1])
NOT = TruthTable(1, [1, 0])


def const_zero_bn(n: int, k: int) -> BooleanNetwork:
    zero = TruthTable(k, [0] * (1 << k))
    inputs = tuple(tuple((i + j) % n for j in range(k)) for i in range(n))
    return BooleanNetwork(n=n, k=k, inputs=inputs, tables=(zero,) * n)


def identity_ring() -> BooleanNetwork:
    return BooleanNetwork(n=2, k=1, inputs=((1,), (0,)), tables=(identity_table(),) * 2)


def negation_loop() -> BooleanNetwork:
    return BooleanNetwork(n=1, k=1, inputs=((0,),), tables=(NOT,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((criterion, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
