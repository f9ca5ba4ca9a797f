from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from pmisolate.generate import genus_g_random
from pmisolate.psg import parse_psg

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def k5():
    return parse_psg(resources.files("pmisolate.data").joinpath("k5_fig1.psg").read_text())


def first_random(pred, seeds=range(400), **params):
    """First generated instance satisfying ``pred``, scanning seeds in order."""
    for seed in seeds:
        g = genus_g_random(seed=seed, **params)
        if pred(g):
            return g
    raise LookupError("no generated instance matched")


def multi_crossing(g):
    return any(len(e.crossings) > 1 for e in g.edges)


def shared_crossing_endpoint(g):
    ends = [v for e in g.edges if e.crossings for v in e.endpoints]
    return len(ends) != len(set(ends))


def cycle_graph(k: int, partition=None):
    from pmisolate.schema import Edge, EmbeddedGraph

    edges = tuple(Edge(i, (i, i % k + 1)) for i in range(1, k + 1))
    rotation = tuple(((v - 1 if v > 1 else k), v) for v in range(1, k + 1))
    return EmbeddedGraph(k, edges, rotation=rotation, partition=partition).validate()


_criteria: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        verdict = "PASS" if report.passed else "FAIL"
        _criteria.append((props["criterion"], verdict, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, detail in sorted(_criteria, key=lambda c: int(c[0].split()[0])):
        terminalreporter.write_line(f"criterion {name}: {verdict}  {detail}".rstrip())
