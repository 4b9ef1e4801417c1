import pytest

from gfsum.fibresum import GluingSide, GluingSpec, fibre_sum
from gfsum.manifold import blow_up, make_s1_times_mk, make_t4, make_z_block, symplectic_resolve
from gfsum.pipeline import h1_map_from_expressions


def h1_override(M, exprs):
    """Embedding map from per-generator expressions over ``M``'s H_1 labels."""
    return h1_map_from_expressions(exprs, M.h1_labels)


@pytest.fixture(scope="session")
def yk():
    A = make_s1_times_mk()
    spec = GluingSpec(GluingSide(A, "S", "F"), GluingSide(A, "F", "S"))
    return fibre_sum(spec, "YK", sigma_label="T_YK", b_label="Sigma", h1_labels=("y", "d")).manifold


@pytest.fixture(scope="session")
def q_mfd():
    M = symplectic_resolve(make_s1_times_mk(label="B", h1_labels=("z", "h")), "S", "F", "Sigma'")
    return blow_up(M, 2, on_surface="Sigma'").relabel("Q")


@pytest.fixture(scope="session")
def r_mfd():
    M = symplectic_resolve(make_t4(), "T1", "T2", "Sigma''")
    return blow_up(M, 2, on_surface="Sigma''").relabel("R")


@pytest.fixture(scope="session")
def u_spec(yk, q_mfd):
    return GluingSpec(
        GluingSide(yk, "Sigma", "T_YK", h1_override(yk, ["y", "d", "0", "0"])),
        GluingSide(q_mfd, "Sigma'", "S", h1_override(q_mfd, ["0", "0", "z", "h"])),
    )


@pytest.fixture(scope="session")
def xk(yk):
    other = yk.relabel("YK2", ("t", "s"))
    spec = GluingSpec(
        GluingSide(yk, "Sigma", "T_YK", h1_override(yk, ["y", "d", "0", "0"])),
        GluingSide(other, "Sigma", "T_YK", h1_override(other, ["0", "0", "t", "s"])),
    )
    return fibre_sum(spec, "XK", sigma_label="Sigma_XK", b_label="B_XK").manifold


def v_spec_for(r_mfd, xk, dual="T1"):
    return GluingSpec(
        GluingSide(r_mfd, "Sigma''", dual),
        GluingSide(xk, "Sigma_XK", "B_XK", h1_override(xk, ["0", "0", "0", "0"])),
    )


@pytest.fixture(scope="session")
def v_spec(r_mfd, xk):
    return v_spec_for(r_mfd, xk)


@pytest.fixture(scope="session")
def x_spec(xk):
    Z = make_z_block()
    return GluingSpec(
        GluingSide(xk, "Sigma_XK", "B_XK", h1_override(xk, ["0", "0", "0", "0"])),
        GluingSide(Z, "Sigma2'", "T"),
    )


_criteria: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for n in getattr(report, "criteria", ()):
        _criteria.setdefault(n, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = tuple(m.args[0] for m in item.iter_markers("criterion"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        ok = all(o == "passed" for o in outcomes)
        failed = sum(o != "passed" for o in outcomes)
        detail = f"{len(outcomes)} tests" + (f", {failed} failed" if failed else "")
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
