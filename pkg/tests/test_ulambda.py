import random
from fractions import Fraction

import pytest

from vermaforge.exact import Poly
from vermaforge.glmod import AlgebraContext, gram
from vermaforge.ulambda import (
    BandAlgebra, BandElement, GVMContext, LieInstance, UElement, UParams, WindowError,
    closure_generator, commutator, degenerate_singular_check, delta_basis, delta_poly,
    gamma_s, gvm_gram, lie_bracket, nondegenerate_counterpart, phi_s, psi_s,
    random_uelement, shift_h, strip_factor, tau, u_product, verify_eq29,
)

h = Poly.var("h")
x = Poly.var("x")
t = Poly.var("t")
LAM = Fraction(5, 7)
P1 = UParams(LAM, Fraction(1))
PT = UParams(LAM, t)


def test_ef_is_T1():
    assert u_product(P1, UElement.e(), UElement.f()) == UElement.poly(P1.T1())
    assert P1.T1() == (h - (h * h).scale(Fraction(1, 2)) + LAM * (LAM + 2) / 2).scale(Fraction(1, 2))
    assert u_product(PT, UElement.f(), UElement.e()) == UElement.poly(PT.T2())


def test_h_e_commutator():
    assert commutator(PT, UElement.h(), UElement.e()) == UElement.e(1, t.scale(2))
    assert commutator(PT, UElement.h(), UElement.f()) == UElement.f(1, t.scale(-2))


def test_casimir_vanishes():
    for p in (P1, PT, UParams(Poly.var("lam"), t)):
        ef = u_product(p, UElement.e(), UElement.f())
        cas = ef.scale(2) - UElement.poly(Poly.coerce(p.t) * h) \
            + UElement.poly((h * h).scale(Fraction(1, 2))) - UElement.poly(p.c)
        assert cas.is_zero()


@pytest.mark.parametrize("params", [P1, PT], ids=["t=1", "symbolic t"])
def test_associativity(params):
    rng = random.Random(7)
    for _ in range(50):
        a, b, c = (random_uelement(rng) for _ in range(3))
        assert u_product(params, u_product(params, a, b), c) == \
            u_product(params, a, u_product(params, b, c))


@pytest.mark.parametrize("params", [P1, PT], ids=["t=1", "symbolic t"])
def test_tau_is_an_anti_automorphism(params):
    rng = random.Random(11)
    for _ in range(30):
        a, b = random_uelement(rng), random_uelement(rng)
        lhs = tau(params.t, u_product(params, a, b))
        rhs = u_product(params, tau(params.t, b), tau(params.t, a))
        assert lhs == rhs
        assert tau(params.t, tau(params.t, a)) == a
    # the defining relations are mapped to relations
    e, f, hh = UElement.e(), UElement.f(), UElement.h()
    assert tau(params.t, commutator(params, hh, e)) == commutator(params, tau(params.t, e), hh)
    assert tau(params.t, u_product(params, e, f)) == UElement.poly(params.T1())


def test_poisson_examples():
    A = h ** 2 + 1
    B = h - 3
    assert lie_bracket(PT, UElement.e(), UElement.f(), at_zero=True) == UElement.h()
    lhs = lie_bracket(PT, UElement.f(1, A), UElement.f(1, B), at_zero=True)
    assert lhs == UElement.f(2, (A * B.derivative("h") - A.derivative("h") * B).scale(2))
    lhs = lie_bracket(PT, UElement.f(1, A), UElement.e(), at_zero=True)
    expected = (PT.c - (h * h).scale(Fraction(1, 2))) * A.derivative("h") - h * A
    assert lhs == UElement.poly(expected)
    with pytest.raises(ValueError):
        lie_bracket(P1, UElement.e(), UElement.f())


@pytest.mark.parametrize("kind", ["gl-lambda", "hyperboloid", "cone"])
@pytest.mark.parametrize("beta", [Fraction(3, 2), Fraction(-1, 3)])
def test_parabolic_closure_codimension(kind, beta):
    inst = LieInstance(kind, LAM)
    rows = closure_generator(inst, beta, 4, degree=5)
    for l, (g, codim) in enumerate(rows, start=1):
        assert codim == l
        assert g == inst.ideal_generator(l, beta)


def test_closure_generators_by_algebra():
    beta = Fraction(3, 2)
    gl = LieInstance("gl-lambda", LAM)
    hy = LieInstance("hyperboloid", LAM)
    assert gl.ideal_generator(3, beta) == (h - beta) * (h - beta - 2) * (h - beta - 4)
    assert hy.ideal_generator(3, beta) == (h - beta) ** 3


def test_degenerate_lambda_rejected():
    with pytest.raises(ValueError):
        GVMContext("gl-lambda", Fraction(0), Fraction(3, 2), x)
    with pytest.raises(ValueError):
        GVMContext("gl-lambda", Fraction(1), Fraction(3, 2), x)
    GVMContext("gl-lambda", Fraction(1, 2), Fraction(3, 2), x)


@pytest.mark.parametrize("beta", [Fraction(3, 2), Fraction(1, 3)])
def test_character_extension(beta):
    ctx = GVMContext("gl-lambda", LAM, beta, x)
    alpha = beta - 2
    assert 3 * ctx.chi_value(2) - 2 * ctx.inst.c == x.scale(2 * (1 + alpha))
    # h_k = [e, f h^{k-1}] with the polynomial written to the left of f
    for k in range(1, 6):
        hk = ctx.inst.bracket(UElement.e(), UElement.f(1, shift_h(h ** (k - 1), -2))).parts[0]
        assert ctx.chi(hk) == x.scale(alpha ** (k - 1))
    hy = GVMContext("hyperboloid", LAM, beta, x)
    assert hy.chi_value(2) == (hy.inst.c + x.scale(beta)).scale(Fraction(2, 3))


@pytest.mark.parametrize("kind", ["gl-lambda", "hyperboloid", "cone"])
def test_gram_symmetric_and_level_one(kind):
    ctx = GVMContext(kind, LAM, Fraction(3, 2), x)
    assert gvm_gram(ctx, 1).matrix == [[x]]
    for level in (2, 3):
        rep = gvm_gram(ctx, level)
        assert len(rep.basis) == [1, 3, 6][level - 1]
        n = len(rep.matrix)
        assert all(rep.matrix[i][j] == rep.matrix[j][i] for i in range(n) for j in range(n))
    with pytest.raises(ValueError):
        gvm_gram(ctx, 4)


def test_gram_contravariance():
    # <a.u, w> = <u, tau(a).w> for the module action of the Lie algebra
    ctx = GVMContext("gl-lambda", LAM, Fraction(3, 2), x)
    basis1 = ctx.basis(1)
    basis2 = ctx.basis(2)
    for (l, j) in [(1, 0), (1, 1), (1, 2)]:
        a = UElement.f(l, h ** j)
        for u in basis1:
            for w in basis2:
                au = ctx.act_elem(a, u)
                lhs = sum((c * ctx.pairing(m, w) for m, c in au.items()), Poly())
                tw = ctx.act_elem(ctx.inst.tau(a), w)
                rhs = sum((c * ctx.pairing(u, m) for m, c in tw.items()), Poly())
                assert lhs == rhs


def test_gl_level2_symbolic_beta():
    beta = Poly.var("beta")
    det = gvm_gram(GVMContext("gl-lambda", LAM, beta, x), 2).det
    shape = x ** 3 * (x - P1.T1(beta)) * P1.T1(beta + 2) * P1.T1(beta - 2)
    assert det.exact_div(shape).is_constant()


def _predicted_roots(level):
    # mu-roots of the gl_infinity determinant, read from gl(2n) with n >= level
    return gram(AlgebraContext(max(level, 2)), level).roots


@pytest.mark.parametrize("beta", [Fraction(3, 2), Fraction(1, 3), Fraction(-2, 5)])
def test_gl_zero_set(beta):
    ctx = GVMContext("gl-lambda", LAM, beta, x)
    T = P1.T1(Poly.const(beta)).constant_value()
    for level in (1, 2, 3):
        det = gvm_gram(ctx, level).det
        for m, mult in _predicted_roots(level):
            k, det = strip_factor(det, x - m * T)
            assert k == mult
        assert det.is_constant() and not det.is_zero()


@pytest.mark.parametrize("beta", [-LAM, LAM + 2])
def test_gl_exceptional_beta_nonvanishing(beta):
    ctx = GVMContext("gl-lambda", LAM, beta, x)
    for level in (1, 2, 3):
        det = gvm_gram(ctx, level).det
        k, rest = strip_factor(det, x)
        assert rest.is_constant() and not rest.is_zero()
        for val in (Fraction(1), Fraction(-3, 4), Fraction(5, 2)):
            assert det.eval({"x": val}) != 0


def test_hyperboloid_and_cone_factorization():
    beta = Poly.var("beta")
    two_c = LAM * (LAM + 2)
    rng = random.Random(3)
    for kind, factor in (("hyperboloid", beta * beta - two_c), ("cone", beta)):
        ctx = GVMContext(kind, LAM, beta, x)
        for level in (1, 2, 3):
            det = gvm_gram(ctx, level).det
            _, rest = strip_factor(det, x)
            _, rest = strip_factor(rest, factor)
            assert rest.is_constant() and not rest.is_zero()
            points = 0
            while points < 20:
                b = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
                xv = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
                if xv == 0 or factor.eval({"beta": b}) == 0:
                    continue
                assert det.eval({"beta": b, "x": xv}) != 0
                points += 1


def test_gamma_examples():
    s = Fraction(1, 3)
    W = 5
    g = gamma_s(P1, UElement.h(), s, W)
    assert all(g.value(0, i) == s - 2 * i for i in range(-W, W + 1))
    ef = gamma_s(P1, u_product(P1, UElement.e(), UElement.f()), s, W)
    prod = gamma_s(P1, UElement.e(), s, W) * gamma_s(P1, UElement.f(), s, W)
    assert ef.agrees_with(prod)
    assert all(prod.value(0, i) == P1.T1(Poly.const(s - 2 * i)).constant_value()
               for i in range(prod.lo, prod.hi + 1))
    with pytest.raises(WindowError):
        g.value(0, W + 1)
    with pytest.raises(ValueError):
        gamma_s(PT, UElement.h(), s, W)


def test_gamma_is_a_homomorphism():
    rng = random.Random(5)
    s, W = Fraction(1, 3), 12
    for _ in range(50):
        a, b = random_uelement(rng), random_uelement(rng)
        lhs = gamma_s(P1, u_product(P1, a, b), s, W)
        rhs = gamma_s(P1, a, s, W) * gamma_s(P1, b, s, W)
        assert lhs.agrees_with(rhs)


def test_psi_phi_is_gamma_and_phi_multiplicative():
    rng = random.Random(9)
    s, W = Fraction(-2, 3), 10
    for _ in range(20):
        a, b = random_uelement(rng), random_uelement(rng)
        assert psi_s(P1, phi_s(P1, a, s, W), s).agrees_with(gamma_s(P1, a, s, W))
        lhs = phi_s(P1, u_product(P1, a, b), s, W)
        assert lhs.agrees_with(phi_s(P1, a, s, W) * phi_s(P1, b, s, W))


def test_delta_image():
    s, W, Wd = Fraction(1, 3), 6, 12
    for i in (1, 2, 3):
        for j in (-2, 0, 1):
            el = u_product(P1, UElement.poly(delta_poly(j, s, Wd)), UElement.e(i))
            coeffs = gamma_s(P1, el, s, W).left_coeffs(i)
            expected = Fraction(1)
            for l in range(i):
                expected *= P1.T1(Poly.const(s - 2 * j - 2 * l)).constant_value()
            assert coeffs[j] == expected
            assert all(v == 0 for jj, v in coeffs.items() if jj != j)


def test_band_relations():
    alg = BandAlgebra.deformed(P1, Fraction(1, 3))
    W = 6
    e = BandElement(alg, -W, W, {1: {i: 1 for i in range(-W, W + 1)}})
    f = BandElement(alg, -W, W, {-1: {i: 1 for i in range(-W, W + 1)}})
    ef = e * f
    assert all(ef.value(0, i) == alg.E(i) for i in range(ef.lo, ef.hi + 1))
    fe = f * e
    assert all(fe.value(0, i) == alg.E(i - 1) for i in range(fe.lo, fe.hi + 1))


@pytest.mark.parametrize("i", range(-3, 4))
def test_degenerate_singular_vectors(i):
    assert degenerate_singular_check(i, 10)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_nondegenerate_counterpart_is_not_singular(i):
    assert not nondegenerate_counterpart(i, 10)


def test_degenerate_window_too_small():
    with pytest.raises(WindowError):
        degenerate_singular_check(3, 4)


def test_delta_basis_counts():
    assert [len(delta_basis(k)) for k in range(1, 6)] == [1, 3, 6, 13, 24]


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_eq29_generic_s(level):
    rep = verify_eq29(level, Fraction(1, 3), LAM)
    assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("s", [-LAM, LAM + 2, Fraction(2)])
def test_eq29_other_s(s):
    for level in (1, 2, 3):
        rep = verify_eq29(level, s, LAM)
        assert rep.passed, rep.to_dict()


def test_eq29_level_two_exceptional_order():
    rep = verify_eq29(2, -LAM, LAM)
    row = [r for r in rep.rows if r.k == 3][0]
    assert row.lhs == row.rhs == 4
