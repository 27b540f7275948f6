import random

import pytest

from exzero.iwasawa import (
    GroupRingElement, IwasawaError, MeasureTower, der_rho, divide_gamma_minus_1,
    integrate, j_expand, log_rho_gamma_int, make_weight_log_rho,
    make_weight_rho_power, pairing_tower, reconstruct, weight_one,
)
from exzero.padic import _val_int


P, M, NMAX = 5, 8, 3


def random_tower(rng, p=P, mod_exp=M, n_max=NMAX, aug_zero=False):
    top = [rng.randrange(p ** mod_exp) for _ in range(p ** n_max)]
    if aug_zero:
        top[0] = (top[0] - sum(top)) % p ** mod_exp
    return MeasureTower.from_top(GroupRingElement(p, n_max, mod_exp, top))


def vali(x, p=P, cap=M):
    x %= p ** cap
    return cap if x == 0 else _val_int(x, p)


# ----------------------------------------------------------------------
# towers


def test_projection_compatibility_enforced():
    good = MeasureTower.dirac(P, M, 2)
    assert good.level0() == 1
    bad_levels = list(good.levels)
    bad_levels[1] = GroupRingElement(P, 1, M, [0] * P)
    with pytest.raises(IwasawaError):
        MeasureTower(bad_levels)


def test_operations_preserve_compatibility():
    rng = random.Random(10)
    t = random_tower(rng)
    # constructor of MeasureTower revalidates; these must not raise
    t.mul_gamma_minus_1()
    t.scale(7)
    t + t


def test_group_ring_shift_and_convolution_agree():
    rng = random.Random(11)
    x = GroupRingElement(P, 2, M, [rng.randrange(P ** M) for _ in range(25)])
    gamma = GroupRingElement.dirac(P, 2, M, 1)
    assert gamma * x == x.shift(1)
    assert x.mul_gamma_minus_1() == gamma * x - x


# ----------------------------------------------------------------------
# integrate


def test_integrate_dirac_trivial_weight():
    t = MeasureTower.dirac(P, M, NMAX)
    res = integrate(t, weight_one)
    assert res.value.residue(M) == 1
    assert res.stabilization == M


def test_integrate_gamma_minus_1_against_trivial_weight():
    t = MeasureTower.dirac(P, M, NMAX).mul_gamma_minus_1()
    res = integrate(t, weight_one)
    assert res.value.is_zero()


def test_integrate_weight_factoring_through_level_one():
    # weights that only see the level-1 class integrate to the level-1 sum
    rng = random.Random(12)
    t = random_tower(rng)
    table = [rng.randrange(P ** M) for _ in range(P)]
    res = integrate(t, lambda level, i: table[i % P])
    direct = sum(table[i] * c for i, c in enumerate(t.levels[1].coeffs)) % P ** M
    assert res.value.residue(res.value.prec) == direct % P ** res.value.prec
    assert res.stabilization == M  # exact agreement across levels


def test_integrate_trivial_weight_equals_c0():
    rng = random.Random(13)
    t = random_tower(rng)
    res = integrate(t, weight_one)
    c0 = j_expand(t, 1).coefficients[0]
    assert res.value.residue(M) == c0.residue(M)


# ----------------------------------------------------------------------
# j_expand


def test_j_expand_dirac():
    exp = j_expand(MeasureTower.dirac(P, M, NMAX), 3)
    assert exp.coefficients[0].residue(M) == 1
    assert exp.coefficients[1].is_zero()
    assert exp.coefficients[2].is_zero()


def test_j_expand_gamma_minus_1_squared():
    t = MeasureTower.dirac(P, M, NMAX).mul_gamma_minus_1().mul_gamma_minus_1()
    exp = j_expand(t, 3)
    assert exp.coefficients[0].is_zero()
    assert exp.coefficients[1].is_zero()
    assert exp.coefficients[2].residue(NMAX) == 1


def test_j_expand_reconstruct_roundtrip():
    rng = random.Random(14)
    for _ in range(25):
        cs = [rng.randrange(P ** M) for _ in range(3)]
        top = GroupRingElement.zero(P, NMAX, M)
        power = GroupRingElement.dirac(P, NMAX, M)
        for c in cs:
            top = top + power.scale(c)
            power = power.mul_gamma_minus_1()
        exp = j_expand(MeasureTower.from_top(top), 3)
        # coefficients recovered at their stated precision
        for c_in, c_out in zip(cs, exp.coefficients):
            prec = c_out.prec
            assert c_out.residue(prec) == c_in % P ** prec
        # reconstruction congruent to the input mod J^3 at the top level
        recon = reconstruct(exp, P, NMAX, M)
        diff = top - recon
        for _ in range(3):
            assert diff.augmentation() % P ** NMAX == 0
            delta = GroupRingElement.dirac(P, NMAX, M).scale(diff.augmentation())
            from exzero.iwasawa import _divide_gamma_minus_1_top
            diff = _divide_gamma_minus_1_top(diff - delta)


def test_j_expand_depth_cap():
    t = MeasureTower.dirac(P, M, 1)
    with pytest.raises(IwasawaError):
        j_expand(t, 3)  # n_max+1 = 2 < 3


# ----------------------------------------------------------------------
# division


def test_divide_requires_zero_augmentation():
    t = MeasureTower.dirac(P, M, NMAX)
    with pytest.raises(IwasawaError):
        divide_gamma_minus_1(t)


def test_divide_construction_example():
    # m = (gamma-1) x  ==>  m' = log_rho(gamma) x  up to the norm element
    rng = random.Random(15)
    ell = log_rho_gamma_int(P, M)
    x = random_tower(rng)
    m = x.mul_gamma_minus_1()
    mp = divide_gamma_minus_1(m)
    diff = mp - x.scale(ell)
    # difference is a multiple of the norm element at every level
    for elt in diff.levels:
        assert len(set(elt.coeffs)) == 1


def test_divide_exact_identity():
    # (gamma-1) m' == ell * m exactly, and twice for J^2 towers
    rng = random.Random(16)
    ell = log_rho_gamma_int(P, M)
    for _ in range(20):
        m = random_tower(rng, aug_zero=True)
        mp = divide_gamma_minus_1(m)
        assert mp.mul_gamma_minus_1() == m.scale(ell)
        m2 = random_tower(rng).mul_gamma_minus_1().mul_gamma_minus_1()
        mpp = divide_gamma_minus_1(divide_gamma_minus_1(m2))
        assert mpp.mul_gamma_minus_1().mul_gamma_minus_1() == m2.scale(ell * ell)


def test_divide_mod_j2_congruence_exact():
    # Lemma-2.10 pattern: ((gamma-1)/ell) m' = m holds exactly at finite level
    rng = random.Random(17)
    ell = log_rho_gamma_int(P, M)
    for _ in range(20):
        m = random_tower(rng, aug_zero=True)
        mp = divide_gamma_minus_1(m)
        lhs = mp.mul_gamma_minus_1()            # (gamma-1) m'
        assert lhs == m.scale(ell)              # equals ell * m on the nose
        # and stays exact after perturbing m' by the norm-element ambiguity
        c = rng.randrange(P ** M)
        perturbed = MeasureTower([e + GroupRingElement.norm_element(P, e.level, M).scale(c * P ** (NMAX - e.level) if e.level < NMAX else c)
                                  for e in mp.levels])
        assert perturbed.mul_gamma_minus_1() == m.scale(ell)


# ----------------------------------------------------------------------
# der_rho (Lemma 2.8 both sides)


def test_der_rho_zero_tower():
    z = MeasureTower.dirac(P, M, NMAX)
    xi = MeasureTower.from_top(GroupRingElement.zero(P, NMAX, M))
    res = der_rho(xi, z)
    assert res.limit_value.is_zero() and res.level0_value.is_zero()


def test_der_rho_requires_vanishing_base():
    z = MeasureTower.dirac(P, M, NMAX)
    xi = MeasureTower.dirac(P, M, NMAX)
    with pytest.raises(IwasawaError):
        der_rho(xi, z)


def test_der_rho_synthetic_gamma_minus_1_instance():
    # xi = (gamma-1) eta: Der equals <ell * eta, z> at level 0, both ways
    rng = random.Random(18)
    ell = log_rho_gamma_int(P, M)
    eta = random_tower(rng)
    xi = eta.mul_gamma_minus_1()
    z = random_tower(rng)
    res = der_rho(xi, z)
    expected = ell * eta.level0() * z.level0() % P ** M
    assert vali(res.level0_value.residue(M) - expected) >= NMAX  # norm gauge
    assert res.agreement_valuation >= min(M, NMAX + 1)


def test_der_rho_hundred_random_instances():
    rng = random.Random(19)
    for _ in range(100):
        xi = random_tower(rng, aug_zero=True)
        z = random_tower(rng)
        res = der_rho(xi, z)
        assert res.agreement_valuation >= min(M, NMAX + 1)


def test_pairing_tower_compatibility_and_der_consistency():
    rng = random.Random(20)
    xi = random_tower(rng, aug_zero=True)
    z = random_tower(rng)
    L = pairing_tower(xi, z)        # constructor checks compatibility
    # integrating log rho against L is route (a) up to the lift convention
    res = der_rho(xi, z)
    riemann = integrate(L, make_weight_log_rho(P, M))
    assert vali(res.limit_value.residue(M) - riemann.top_sum) >= min(M, NMAX + 1)


def test_generator_independence_of_level0_values():
    # recompute with gamma' = gamma^(1+p): level-0 value of the division agrees
    rng = random.Random(21)
    m = random_tower(rng, aug_zero=True)
    a = 1 + P
    m_re = m.map_levels(lambda e: e.reindex(a))
    # divide with the gamma'-normalization: log rho(gamma') = (1+p) ell
    ell = log_rho_gamma_int(P, M)
    from exzero.iwasawa import _divide_gamma_minus_1_top
    topb = _divide_gamma_minus_1_top(m_re.top.scale(ell * a))
    v1 = divide_gamma_minus_1(m).level0()
    v2 = MeasureTower.from_top(topb).level0()
    assert vali(v1 - v2) >= NMAX


# ----------------------------------------------------------------------
# weights


def test_weight_rho_power_trivial_at_s_equals_1():
    w = make_weight_rho_power(0, P, M)
    assert all(w(NMAX, i) == 1 for i in range(5))


def test_weight_rho_power_requires_convergence_region():
    with pytest.raises(IwasawaError):
        make_weight_rho_power(3, P, M)
