import numpy as np
import pytest

from modstab import (
    BiMap,
    ModularSpec,
    Perturbation,
    PreconditionError,
    ProbeSet,
    PsiEnvelope,
    StabilizeConfig,
    check_biadditivity,
    check_biderivation,
    check_first_slot_linearity,
    check_inequality_A,
    check_inequality_B,
    check_stability_bound,
    check_superstability,
    default_linearity_scalars,
    draw_probes,
    eval_modular,
    preset,
    stabilize,
)
from modstab.scenarios import calibrate_theta

MATRIX2 = preset("matrix2")
COMPLEX = preset("complex")
ZERO_MUL = preset("zero_mul", dim=3)
NORM = ModularSpec(kind="norm")


def rho_rows(rows):
    return eval_modular(NORM, np.atleast_2d(rows))


def one_probe(x, y, z, w, lam=1.0):
    arr = lambda v: np.array([[complex(v)]], dtype=complex)
    return ProbeSet(
        x=arr(x), y=arr(y), z=arr(z), w=arr(w),
        lam=np.array([lam], dtype=complex), seed=0, radius=1.0, mandatory={},
    )


def random_tensor_map(seed, algebra=MATRIX2, scale=1.0):
    rng = np.random.default_rng(seed)
    d = algebra.dim
    t = scale * (rng.normal(size=(d, d, d)) + 1j * rng.normal(size=(d, d, d)))
    return BiMap(algebra=algebra, kernel="tensor", tensor=t)


QUAD = BiMap(algebra=COMPLEX, kernel=None, perturbation=Perturbation("quad_slot1", 1.0))


# --- inequality A ------------------------------------------------------------


def test_inequality_A_vanishes_for_bilinear_maps():
    probes = draw_probes(4, 64, 1.0, seed=1)
    recs = check_inequality_A(random_tensor_map(3), rho_rows, 0.5, None, probes)
    assert all(r.passed for r in recs)
    assert max(r.lhs for r in recs) <= 1e-10


def test_inequality_A_quadratic_probe_arithmetic():
    # f(x,z) = x^2 z at x=y=1, z=1, w=0: defect is 2 f(2,1) - 4 f(1,1) = 4
    recs = check_inequality_A(QUAD, rho_rows, 0.5, None, one_probe(1, 1, 1, 0))
    assert len(recs) == 1
    assert recs[0].lhs == pytest.approx(4.0, abs=1e-12)
    assert recs[0].rhs == pytest.approx(0.0, abs=1e-12)
    assert not recs[0].passed


def test_inequality_checkers_enforce_preconditions():
    probes = draw_probes(4, 32, 1.0, seed=20)
    f = BiMap(algebra=MATRIX2, kernel="commutator", zero_boundary=False)
    with pytest.raises(PreconditionError):
        check_inequality_A(f, rho_rows, 0.5, None, probes)
    with pytest.raises(PreconditionError):
        check_inequality_B(f, rho_rows, 0.5, None, probes)
    with pytest.raises(PreconditionError):
        check_inequality_A(random_tensor_map(1), rho_rows, 1.2, None, probes)


def test_inequality_A_shrinking_s_never_breaks_zero_defect():
    probes = draw_probes(4, 32, 1.0, seed=2)
    f = random_tensor_map(4)
    for s in (0.9, 0.45, 0.1, 0.01):
        recs = check_inequality_A(f, rho_rows, s, None, probes)
        assert all(r.passed for r in recs)


# --- inequality B ------------------------------------------------------------


def test_inequality_B_vanishes_for_bilinear_maps():
    probes = draw_probes(4, 64, 1.0, seed=3)
    recs = check_inequality_B(random_tensor_map(5), rho_rows, 0.5, None, probes)
    assert all(r.passed for r in recs)
    assert max(r.lhs for r in recs) <= 1e-10


def test_inequality_B_quadratic_fails_at_second_zero_probe():
    # y = w = 0 reduces the defect to 8 f(x/2, z) - 4 f(x, z) = -2 f(x, z)
    recs = check_inequality_B(QUAD, rho_rows, 0.5, None, one_probe(1, 0, 1, 0))
    assert recs[0].lhs == pytest.approx(2.0, abs=1e-12)
    assert not recs[0].passed
    # the halving in the first argument hides pure second-degree terms at x = y
    recs2 = check_inequality_B(QUAD, rho_rows, 0.5, None, one_probe(1, 1, 1, 0))
    assert recs2[0].lhs <= 1e-12
    assert recs2[0].passed


# --- biadditivity -------------------------------------------------------------


def test_biadditivity_of_kernels():
    probes = draw_probes(4, 64, 1.0, seed=4)
    rep = check_biadditivity(random_tensor_map(6), rho_rows, probes)
    assert rep.passed and rep.slot1_sup <= 1e-12 and rep.slot2_sup <= 1e-12


def test_biadditivity_detects_oscillation():
    probes = draw_probes(4, 64, 1.0, seed=5)
    d = BiMap(algebra=MATRIX2, kernel="commutator",
              perturbation=Perturbation("bounded_osc", 0.1))
    rep = check_biadditivity(d, rho_rows, probes)
    assert not rep.passed
    assert rep.slot1_sup > 1e-3


def test_biadditivity_zero_map():
    probes = draw_probes(4, 32, 1.0, seed=6)
    zero = BiMap(algebra=MATRIX2, kernel="product", coeff=0.0)
    rep = check_biadditivity(zero, rho_rows, probes)
    assert rep.slot1_sup == 0.0 and rep.slot2_sup == 0.0


def test_passing_inequality_A_implies_biadditivity():
    # fixtures that clear the defect check with no envelope must also clear
    # the additivity check at ten times the identity tolerance
    probes = draw_probes(4, 64, 1.0, seed=7)
    fixtures = [random_tensor_map(s) for s in range(20, 26)]
    fixtures.append(BiMap(algebra=MATRIX2, kernel="commutator",
                          perturbation=Perturbation("quad_slot1", 0.4)))
    for f in fixtures:
        recs = check_inequality_A(f, rho_rows, 0.5, None, probes)
        if all(r.margin <= 0 for r in recs):
            rep = check_biadditivity(f, rho_rows, probes)
            assert rep.slot1_sup <= 1e-9 and rep.slot2_sup <= 1e-9


# --- first slot homogeneity ---------------------------------------------------


def test_linearity_of_complex_bilinear_kernel():
    probes = draw_probes(4, 48, 1.0, seed=8)
    recs = check_first_slot_linearity(
        random_tensor_map(9), rho_rows, default_linearity_scalars(0), probes
    )
    assert all(r.passed for r in recs)
    assert max(r.lhs for r in recs) <= 1e-10


def test_linearity_route_reported_for_generic_scalars():
    probes = draw_probes(4, 32, 1.0, seed=9)
    recs = check_first_slot_linearity(
        random_tensor_map(10), rho_rows, [2.0 + 1.0j], probes
    )
    assert "route" in recs[0].extra and "M" in recs[0].extra
    assert recs[0].extra["M"] > 4 * abs(2.0 + 1.0j)


def test_conjugation_fails_at_imaginary_unit():
    conj = BiMap(algebra=COMPLEX, kernel="conjugate_product")
    probes = draw_probes(1, 32, 1.0, seed=10)
    recs = check_first_slot_linearity(conj, rho_rows, [1.0, 1j], probes)
    by_lam = {tuple(r.extra["lam"]): r for r in recs}
    assert by_lam[(1.0, 0.0)].lhs <= 1e-15
    bad = by_lam[(0.0, 1.0)]
    assert not bad.passed
    # f(i x, z) - i f(x, z) = -2i conj(x) z
    expected = float(np.max(2.0 * np.abs(probes.x[:, 0]) * np.abs(probes.z[:, 0])))
    assert bad.lhs == pytest.approx(expected, abs=1e-12)


# --- stability bound -----------------------------------------------------------


def test_stability_bound_trivial_for_exact_limit():
    probes = draw_probes(4, 48, 1.0, seed=11)
    d = BiMap(algebra=MATRIX2, kernel="commutator")
    psi = PsiEnvelope(theta=1.0, p=0.5, direction="ascending")
    recs = check_stability_bound(d, d, psi, rho_rows, probes)
    assert all(r.passed for r in recs)
    assert all(r.margin <= 0.0 for r in recs)


def test_stability_bound_flags_oversized_perturbation():
    probes = draw_probes(4, 128, 1.0, seed=12)
    small = BiMap(algebra=MATRIX2, kernel="commutator",
                  perturbation=Perturbation("bounded_osc", 0.01, boundary_safe=True))
    psi0 = PsiEnvelope(theta=1.0, p=0.5, direction="ascending")
    theta = calibrate_theta(small, psi0, rho_rows, 0.5, probes, which="A")
    psi = psi0.with_theta(theta)

    big = BiMap(algebra=MATRIX2, kernel="commutator",
                perturbation=Perturbation("bounded_osc", 0.5, boundary_safe=True))
    cfg = StabilizeConfig(direction="ascending", probes=probes)
    out = stabilize(big, psi, rho_rows, cfg, telescoping=False)
    recs = check_stability_bound(big, out.D, psi, rho_rows, probes)
    assert any(r.margin > 0 for r in recs)


def test_stability_bound_corollary_constant_reported():
    probes = draw_probes(4, 32, 1.0, seed=13)
    d = BiMap(algebra=MATRIX2, kernel="commutator")
    psi = PsiEnvelope(theta=1.0, p=0.5, direction="ascending")
    recs = check_stability_bound(d, d, psi, rho_rows, probes, corollary_theta=1.0)
    assert all("corollary_rhs" in r.extra for r in recs)


# --- derivation residuals -------------------------------------------------------


def test_commutator_is_a_biderivation():
    probes = draw_probes(4, 64, 1.0, seed=14)
    d = BiMap(algebra=MATRIX2, kernel="commutator")
    recs = check_biderivation(d, rho_rows, MATRIX2, None, probes, assert_slot2=True)
    assert all(r.passed for r in recs)
    assert max(r.lhs for r in recs) <= 1e-12


def test_zero_product_algebra_everything_is_a_biderivation():
    probes = draw_probes(3, 32, 1.0, seed=15)
    d = random_tensor_map(16, algebra=ZERO_MUL)
    recs = check_biderivation(d, rho_rows, ZERO_MUL, None, probes, assert_slot2=True)
    # products vanish, so residuals reduce to f(0, z) etc., exactly zero
    assert all(r.lhs == 0.0 for r in recs)


def test_plain_product_violates_the_leibniz_rule():
    probes = draw_probes(1, 32, 1.0, seed=16)
    d = BiMap(algebra=COMPLEX, kernel="product")
    recs = check_biderivation(d, rho_rows, COMPLEX, None, probes)
    slot1 = [r for r in recs if r.check_name == "biderivation_slot1"]
    expected = np.abs(probes.x[:, 0] * probes.y[:, 0] * probes.z[:, 0])
    for r, want in zip(slot1, expected):
        assert r.lhs == pytest.approx(float(want), abs=1e-13)
    assert any(not r.passed for r in slot1)


def test_slot2_records_are_advisory_by_default():
    probes = draw_probes(1, 32, 1.0, seed=17)
    d = BiMap(algebra=COMPLEX, kernel="product")
    recs = check_biderivation(d, rho_rows, COMPLEX, None, probes)
    assert all(r.advisory for r in recs if r.check_name == "biderivation_slot2")
    assert all(not r.advisory for r in recs if r.check_name == "biderivation_slot1")


# --- exact-scaling certificate ---------------------------------------------------


def test_superstability_of_kernels_and_zero():
    probes = draw_probes(4, 48, 1.0, seed=18)
    assert check_superstability(random_tensor_map(19), rho_rows, probes).is_superstable
    zero = BiMap(algebra=MATRIX2, kernel="product", coeff=0.0)
    assert check_superstability(zero, rho_rows, probes).is_superstable


def test_superstability_rejects_oscillation():
    probes = draw_probes(4, 48, 1.0, seed=19)
    d = BiMap(algebra=MATRIX2, kernel="commutator",
              perturbation=Perturbation("bounded_osc", 0.05))
    rep = check_superstability(d, rho_rows, probes)
    assert not rep.is_superstable
    assert rep.sup_residual > 1e-4
