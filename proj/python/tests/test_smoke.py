import math

import pytest

import qtp

ORACLE = {
    "p": 2,
    "mu": 0.2,
    "A_plus": 4,
    "A_minus": 1,
    "g": {"expr": "x1"},
    "domain": {"kind": "interval", "resolution": 128},
}


def test_mollifier_split():
    for t in (-1.0, 0.0, 0.003, 0.5):
        assert qtp.Psi_plus(0.01, t) - qtp.Psi_minus(0.01, t) == pytest.approx(t, abs=1e-15)
    assert qtp.psi_plus(0.1, 0.05) == pytest.approx(0.5)
    assert qtp.geometric_schedule(0.4, 3) == pytest.approx([0.4, 0.2, 0.1])


def test_oracle_matches_solve():
    oracle = qtp.solve_oracle_1d(4.0, 1.0, 2.0)
    assert oracle.x0 == pytest.approx(-0.6)
    u, report = qtp.solve(ORACLE, 1e-3)
    assert report.converged
    err = max(abs(v - oracle(x[0])) for x, v in zip(u.nodes, u.values))
    assert err <= 2.0 / 128


def test_validation_and_errors():
    assert qtp.validate_spec(ORACLE) == []
    bad = dict(ORACLE, mu=1.5)
    assert qtp.validate_spec(bad)
    with pytest.raises(qtp.Error):
        qtp.solve(bad, 1e-3)


def test_tab_round_trip_and_dyadic():
    u, _ = qtp.solve(ORACLE, 1e-3)
    back = qtp.invert_tab(2.0, 3.0, qtp.apply_tab(2.0, 3.0, u))
    assert back.values == pytest.approx(u.values, rel=1e-15)
    zero = qtp.nearest_zero(u)
    prof = qtp.dyadic_decay_profile(u, 0.5, 4, zero)
    assert len(prof.sups) == 4
    assert 0.85 <= prof.fitted_alpha <= 1.0 + 1e-9


def test_continuation_rows():
    spec = dict(ORACLE, domain={"kind": "interval", "resolution": 64})
    c = qtp.continuation(spec, [0.4, 0.2, 0.1])
    assert len(c["cauchy_gaps"]) == 2
    assert max(c["split_checks"]) <= 1e-12
    assert all(math.isfinite(g) for g in c["grad_norms"])
