from itertools import combinations

import pytest

from holonomy_forge import orbifold
from holonomy_forge.cli import parse_orbifold_spec
from holonomy_forge.resources import asset_path


@pytest.fixture(scope="session")
def t7_spec():
    return parse_orbifold_spec(asset_path("t7_z2cubed.orb").read_text())


@pytest.fixture(scope="session")
def gamma(t7_spec):
    return orbifold.generate_group(t7_spec.generators, dim=7)


def all_subgroups(group):
    """Every subgroup of a small group, found as closures of element subsets of size <= 3."""
    seen = {}
    elems = group.non_identity()
    for r in range(0, 4):
        for gens in combinations(elems, r):
            sub = orbifold.generate_group(list(gens), dim=group.dim)
            key = frozenset((g.linear, g.translation) for g in sub.elements)
            seen.setdefault(key, sub)
    return list(seen.values())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
