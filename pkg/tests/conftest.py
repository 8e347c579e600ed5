import numpy as np
import pytest


def random_density_matrix(rng, k=4):
    """Reduced state of a random pure state on C^4 (x) C^k."""
    psi = rng.normal(size=(4, k)) + 1j * rng.normal(size=(4, k))
    rho = psi @ psi.conj().T
    return rho / np.trace(rho).real


def random_local_unitary(rng):
    def u2():
        q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        return q * (np.diag(r) / np.abs(np.diag(r)))
    return np.kron(u2(), u2())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion id -> (passed, detail); filled by test_acceptance, printed at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("ab")), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")
