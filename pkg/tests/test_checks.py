import numpy as np

from liouvgap import checks
from liouvgap.liouvillian import bell_state


def test_all_checks_pass():
    results = checks.run_checks()
    failed = [(r.name, r.detail) for r in results if not r.passed]
    assert not failed


def test_report_has_wall_time():
    results = checks.run_checks({"kappa": checks.check_default_kappa})
    report = checks.format_report(results)
    assert "seconds" in report.splitlines()[0]
    assert f"{results[0].seconds:7.3f}" in report
    assert report.endswith("1/1 checks passed")


def test_corrupted_bell_is_caught():
    def corrupted(n):
        b = bell_state(n)
        b[1] += 0.1
        return b / np.linalg.norm(b)

    ok, detail = checks.check_bell_annihilation(bell_fn=corrupted)
    assert not ok, detail
    assert checks.check_bell_annihilation()[0]


def test_crashing_check_is_a_failure():
    def boom():
        raise RuntimeError("bad")

    (r,) = checks.run_checks({"boom": boom})
    assert not r.passed and "RuntimeError" in r.detail


def test_check_covers_every_module():
    names = set(checks.CHECKS)
    for required in ("pauli_algebra_identities", "vec_identity_AρB", "bell_annihilation",
                     "spectrum_sanity", "expansion_equivalence", "energy_gradient_vs_fd"):
        assert required in names
