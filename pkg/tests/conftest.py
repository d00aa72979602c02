import os

from hypothesis import HealthCheck, settings

from cegrp.instance import parse_instance

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_instance(nodes=(), edges=(), depot=(0.0, 0.0), L=1e6, Q=100, max_vehicles=None, name="t"):
    """Instance from ``nodes=[(x, y, r), ...]`` and ``edges=[((ax, ay), (bx, by)), ...]``.

    Node ids are 1..n, edge ids continue after them.
    """
    doc = {
        "name": name,
        "depot": list(depot),
        "nodes": [{"id": i + 1, "center": [x, y], "radius": r} for i, (x, y, r) in enumerate(nodes)],
        "edges": [{"id": len(nodes) + j + 1, "a": list(a), "b": list(b)} for j, (a, b) in enumerate(edges)],
        "fleet": {"L": L, "Q": Q, "max_vehicles": max_vehicles},
    }
    return parse_instance(doc)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
