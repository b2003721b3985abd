"""Perturbation families, set-limit probes, and epi-convergence checks."""

import numpy as np
import pytest

from hamrep import geometry, models, stability as stb
from hamrep.conjugate import GridFunction

INF = np.inf

POINTS = [(0.0, 0.0, (0.0, 0.0)), (0.0, 1.0, (0.6, 0.4)),
          (0.5, -0.5, (-0.3, 0.7)), (1.0, 0.5, (0.9, 0.0)),
          (0.0, 0.3, (0.0, -0.8))]


def _ball(r, n=256):
    a = 2.0 * np.pi * np.arange(n) / n
    return geometry.ConvexBody.from_points(
        np.column_stack([r * np.cos(a), r * np.sin(a)]))


# ------------------------------------------------------------
# family construction
# ------------------------------------------------------------

def test_family_validation(catalog):
    with pytest.raises(ValueError):
        stb.PerturbationFamily(catalog["EX2"], "wiggle")
    with pytest.raises(ValueError):
        stb.PerturbationFamily(catalog["EX2"], "shift", rho=-1.0)
    with pytest.raises(ValueError):
        stb.PerturbationFamily(catalog["EX2"], "shift", schedule=(1, 2))
    with pytest.raises(ValueError):
        stb.PerturbationFamily(catalog["EX2"], "shift", schedule=(1, 4, 2))


def test_shift_member_moves_h_and_l_oppositely(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift")
    m = fam.member(8)
    assert m.key == "EX2~shift8"
    base = catalog["EX2"]
    assert m.hamiltonian.H(0.0, 0.5, 1.0) - base.hamiltonian.H(0.0, 0.5, 1.0) == 0.03125
    assert m.lagrangian.L(0.0, 0.5, 0.3) - base.lagrangian.L(0.0, 0.5, 0.3) == -0.03125
    # the upper bound is untouched: L_i <= L <= lambda
    assert m.lagrangian.lam(0.0, 0.5) == base.lagrangian.lam(0.0, 0.5)


def test_bump_member_localized(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "bump")
    m = fam.member(4)
    base = catalog["EX2"]
    assert m.hamiltonian.H(0.0, 0.0, 0.0) - base.hamiltonian.H(0.0, 0.0, 0.0) == 0.0625
    assert m.hamiltonian.H(0.0, 2.0, 0.0) == base.hamiltonian.H(0.0, 2.0, 0.0)


def test_drift_member_is_base(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "drift")
    assert fam.member(5) is catalog["EX2"]
    t, x, a = fam.point(4, 0.0, 1.0, np.array([0.8, 0.0]))
    assert t == 0.0125 and x == 1.025
    assert np.allclose(a, [0.78, 0.0])


def test_deviation_sup_decays(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift")
    d4 = fam.deviation_sup(4)
    d8 = fam.deviation_sup(8)
    assert d4 == {"H": 0.0625, "lam": 0.0, "c": 0.0}
    assert d8["H"] == 0.03125


def test_family_members_keep_conditions(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift", schedule=(1, 4, 16))
    plan = models.SamplePlan.default(k=50, seed=2)
    reports = stb.family_condition_reports(fam, plan=plan)
    assert {r.condition for r in reports} == {"H1", "H2", "H3", "H4", "HLC"}
    assert all(r.passed for r in reports)


# ------------------------------------------------------------
# e-map convergence audits
# ------------------------------------------------------------

def test_zero_perturbation_is_identically_zero(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift", rho=0.0)
    r = stb.stability_audit_e(fam, POINTS)
    assert r.passed
    assert np.all(r.deviations == 0.0)
    assert r.r_squared == 1.0


def test_shift_audit_fits_inverse_rate(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift")
    r = stb.stability_audit_e(fam, POINTS)
    assert r.passed
    assert r.final <= 1e-2
    assert r.r_squared >= 0.999
    assert 0.1 < r.rate_constant < 0.5
    # nonincreasing along the schedule
    assert np.all(np.diff(r.deviations) <= 1e-12)


@pytest.mark.parametrize("kind", ["bump", "drift"])
def test_other_families_converge(catalog, kind):
    fam = stb.PerturbationFamily(catalog["EX2"], kind)
    r = stb.stability_audit_e(fam, POINTS)
    assert r.passed
    assert r.final <= 1e-2
    assert r.r_squared >= 0.99


def test_audit_is_deterministic(catalog):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift", schedule=(1, 4, 16))
    a = stb.stability_audit_e(fam, POINTS)
    b = stb.stability_audit_e(fam, POINTS)
    assert np.array_equal(a.deviations, b.deviations)
    assert a.rate_constant == b.rate_constant


def test_fit_inverse_rate():
    sched = (1, 2, 4, 8)
    C, r2 = stb.fit_inverse_rate(sched, [1.0, 0.5, 0.25, 0.125])
    assert C == pytest.approx(1.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)
    C0, r20 = stb.fit_inverse_rate(sched, [0.0, 0.0, 0.0, 0.0])
    assert (C0, r20) == (0.0, 1.0)
    _, r2c = stb.fit_inverse_rate(sched, [1.0, 1.0, 1.0, 1.0])
    assert r2c < 0.9


# ------------------------------------------------------------
# sampled set limits
# ------------------------------------------------------------

def test_probe_validation():
    b = _ball(1.0)
    with pytest.raises(ValueError):
        stb.SetSequenceProbe((b, b), b, np.array([[2.0, 0.0]]))
    with pytest.raises(ValueError):
        stb.SetSequenceProbe((b, b, b), b, np.array([[2.0, 0.0, 0.0]]))


def test_constant_sequence_has_zero_deviation():
    b = _ball(1.0)
    r = stb.set_limit_check(stb.SetSequenceProbe((b,) * 4, b, np.array([[2.0, 0.0]])))
    assert r.passed
    assert r.worst_last == 0.0
    assert np.all(r.deviations == 0.0)


def test_shrinking_balls_deviation_is_inverse_index():
    bodies = tuple(_ball(1.0 + 1.0 / i) for i in (1, 2, 4, 8, 16, 32, 64))
    probe = stb.SetSequenceProbe(bodies, _ball(1.0),
                                 np.array([[2.0, 0.0], [0.0, -3.0]]))
    r = stb.set_limit_check(probe, tol=2e-2)
    assert r.passed
    # probes sit on vertex rays, so the polygon distances are exact
    assert r.worst_last == 1.0 / 64.0
    assert r.deviations[0].max() == 1.0


def test_non_converging_sequence_fails():
    bodies = (_ball(2.0),) * 5
    probe = stb.SetSequenceProbe(bodies, _ball(1.0), np.array([[3.0, 0.0]]))
    r = stb.set_limit_check(probe, tol=1e-2)
    assert not r.passed
    assert r.worst_last == pytest.approx(1.0, abs=1e-12)


def test_epigraph_bodies_converge_with_state(catalog):
    from hamrep import epigraph as ep
    bodies = tuple(ep.section(catalog["EX2"], 0.0, 1.0 / i).to_body(3.0)
                   for i in (1, 2, 4, 8, 16, 32, 64))
    target = ep.section(catalog["EX2"], 0.0, 0.0).to_body(3.0)
    probe = stb.SetSequenceProbe(bodies, target,
                                 np.array([[0.0, -2.0], [2.0, 0.0], [0.5, -1.0]]))
    r = stb.set_limit_check(probe, tol=2e-2)
    assert r.passed
    assert r.worst_last <= 2e-2


# ------------------------------------------------------------
# epi-convergence
# ------------------------------------------------------------

def _parabola(n=41):
    return GridFunction.sample(lambda v: v * v, -1.0, 1.0, n)


def test_epi_identity_passes():
    f = _parabola()
    r = stb.epi_convergence_check([f] * 5, f)
    assert r.passed
    assert r.lower_gap == 0.0 and r.upper_gap == 0.0


def test_epi_vanishing_shift_passes():
    f = _parabola()
    fs = [GridFunction.from_values(f.lo[0], f.h[0], f.values + 1.0 / i)
          for i in (1, 2, 4, 8, 16, 32, 64)]
    r = stb.epi_convergence_check(fs, f)
    assert r.passed
    assert r.upper_gap == pytest.approx(1.0 / 64.0, abs=1e-12)
    assert r.lower_gap <= 0.0


def test_epi_undercut_fails_lower():
    f = _parabola()
    fs = [GridFunction.from_values(f.lo[0], f.h[0], f.values - 0.5)] * 5
    r = stb.epi_convergence_check(fs, f)
    assert not r.passed
    assert r.lower_gap == pytest.approx(0.5, abs=1e-12)


def test_epi_recovery_allows_one_cell():
    # a +10 spike at one node is recovered through its neighbor
    f = _parabola()
    spiked = f.values.copy()
    spiked[25] += 10.0
    fs = [GridFunction.from_values(f.lo[0], f.h[0], spiked)] * 5
    r = stb.epi_convergence_check(fs, f)
    assert r.passed
    assert r.upper_gap <= 0.0


def test_epi_infinite_nodes_demand_blowup():
    F = GridFunction.from_values(-2.0, 1.0, np.array([INF, 1.0, 0.0, 1.0, INF]))
    good = [GridFunction.from_values(-2.0, 1.0,
                                     np.array([INF, 1.0, 0.0, 1.0, INF]))] * 4
    assert stb.epi_convergence_check(good, F).passed
    stalled = [GridFunction.from_values(-2.0, 1.0,
                                        np.array([1e3, 1.0, 0.0, 1.0, 1e3]))] * 4
    r = stb.epi_convergence_check(stalled, F)
    assert not r.passed
    assert r.lower_gap == INF


def test_epi_input_validation():
    f = _parabola()
    g = GridFunction.sample(lambda v: v * v, -1.0, 1.0, 21)
    with pytest.raises(ValueError):
        stb.epi_convergence_check([f] * 2, f)
    with pytest.raises(ValueError):
        stb.epi_convergence_check([g] * 5, f)


# ------------------------------------------------------------
# report io
# ------------------------------------------------------------

def test_stability_report_io(catalog, tmp_path):
    fam = stb.PerturbationFamily(catalog["EX2"], "shift", schedule=(1, 4, 16))
    r = stb.stability_audit_e(fam, POINTS[:2])
    csv_path = tmp_path / "stab.csv"
    json_path = tmp_path / "stab.json"
    stb.save_stability_csv(r, csv_path)
    stb.save_stability_json(r, json_path)
    import json
    payload = json.loads(json_path.read_text())
    assert payload["kind"] == "shift"
    assert payload["schedule"] == [1, 4, 16]
    assert payload["passed"] is True
    assert len(payload["deviations"]) == 3
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "index,deviation"
    assert len(lines) == 4
    # byte-identical on rerun
    stb.save_stability_json(r, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == json_path.read_bytes()
