"""Shape and outcome of the cheap identity suites (the expensive ones run
through the acceptance tests)."""
from fareyphase import verify


def test_totient_suite():
    r = verify.check_totient(k=20, n_max=40)
    assert r.suite == "totient"
    assert r.ok and r.cases == 40 and r.failures == 0


def test_ball_sum_suite():
    r = verify.check_ball_sums(k_max=14)
    assert r.ok and r.cases == 13


def test_zeta_suite():
    r = verify.check_zeta_ratio()
    assert r.ok and "gap=" in r.detail


def test_sandwich_suite_small():
    r = verify.check_sandwich()
    assert r.ok and r.failures == 0


def test_telescope_suite_small():
    r = verify.check_telescope()
    assert r.ok and r.failures == 0


def test_result_flag_logic():
    bad = verify.CheckResult(suite="x", cases=3, failures=1, detail="")
    assert not bad.ok
