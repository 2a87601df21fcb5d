#include "doctest.h"
#include "hk/pipeline.hpp"
#include "oracle.hpp"

using namespace hk;
using HP = HarmonicPoly;

namespace {
HP mono(int a, int b, int c, int d, long num = 1, long den = 1) {
    return HP::monomial(a, b, c, d, GaussQ::rational(num, den));
}

// Monomial in z- only: exponents per z-a.
Series zminus(int n, int D, std::vector<int> e, const HP& h) {
    ZKey k = 0;
    for (int a = 0; a < int(e.size()); ++a)
        for (int i = 0; i < e[a]; ++i) k += zunit(2 * n + a);
    return Series::term(n, D, k, h);
}

Series quartic(int D, long num = 1, long den = 10) { return zminus(1, D, {2, 2}, HP::constant(GaussQ::rational(num, den))); }

bool zero_upto_valid(const Series& s) { return s.is_zero_upto(std::min(s.valid(), s.order())); }
}  // namespace

TEST_CASE("validate_prepotential") {
    Dims d(1, 1, 0);
    CHECK_NOTHROW(validate_prepotential(Series::zero(1, 4, 4), d));
    CHECK_NOTHROW(validate_prepotential(quartic(4), d));
    Series zp = Series::term(1, 4, zunit(0) + 3 * zunit(2), HP::constant(GaussQ(1)));
    try {
        validate_prepotential(zp, d);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DependsOnZPlus);
    }
    try {
        validate_prepotential(zminus(1, 4, {1, 0}, mono(2, 0, 0, 0)), d);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCharge4);
    }
    try {
        validate_prepotential(Series::constant(1, 4, mono(2, 0, 0, 0) * mono(2, 0, 0, 0)), d);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonzeroAtOrigin);
    }
}

TEST_CASE("build_Hpp on the u-dependent quadratic example") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 4;
    const GaussQ lam = GaussQ::rational(2, 5);
    Prepotential L = validate_prepotential(zminus(1, D, {2, 0}, mono(2, 0, 0, 0).scaled(lam)), d);
    FrameField H = build_Hpp(P, L);
    CHECK(H.coeff(ix_em(d, 0)).is_zero());
    CHECK(H.coeff(ix_em(d, 1)).equal_upto(zminus(1, D, {1, 0}, mono(2, 0, 0, 0).scaled(GaussQ(2) * lam)), D));
    auto A = E_matrix(P, H);
    CHECK(A[1][0].equal_upto(Series::constant(1, D, mono(2, 0, 0, 0).scaled(GaussQ(2) * lam)), D));
    CHECK(A[0][0].is_zero());
    CHECK(A[0][1].is_zero());
    CHECK(A[1][1].is_zero());
    CHECK(H.coeff(ix_ep(d, 1)).equal_upto(Series::term(1, D, zunit(0), mono(2, 0, 0, 0).scaled(GaussQ(2) * lam)), D));
    CHECK(H.coeff(ix_ep(d, 0)).is_zero());

    FrameField H0 = build_Hpp(P, validate_prepotential(Series::zero(1, D, 4), d));
    FrameField diff = H0 - FrameField::flat(d, D, ix_Hpp());
    CHECK(diff.is_zero_upto(D));
}

TEST_CASE("bridge for the flat and u-dependent quadratic prepotentials") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 4;
    Prepotential flat = validate_prepotential(Series::zero(1, D, 4), d);
    Bridge B0 = solve_bridge(P, flat);
    for (int a = 0; a < 2; ++a) {
        CHECK(B0.phi_minus[a].equal_upto(Series::variable(1, D, 2 + a), D));
        CHECK(B0.phi_plus[a].equal_upto(Series::variable(1, D, a), D));
    }
    CHECK(B0.psi_available);
    for (auto& r : B0.psi)
        for (auto& s : r) CHECK(s.is_zero());

    const GaussQ lam = GaussQ::rational(2, 5);
    Prepotential L = validate_prepotential(zminus(1, D, {2, 0}, mono(2, 0, 0, 0).scaled(lam)), d);
    Bridge B = solve_bridge(P, L);
    CHECK(B.phi_minus[0].equal_upto(Series::variable(1, D, 2), D));
    Series expect = Series::variable(1, D, 3) + zminus(1, D, {1, 0}, mono(1, 0, 1, 0).scaled(GaussQ(2) * lam));
    CHECK(B.phi_minus[1].equal_upto(expect, D));
    CHECK(bridge_residuals(P, L, B).ok());
}

TEST_CASE("quartic benchmark frame") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 6;
    Prepotential L = validate_prepotential(quartic(D), d);
    Bridge B;
    HKFrame F = build_canonical_frame(P, L, &B);
    CHECK(bridge_residuals(P, L, B).ok());
    ResidualReport ax = check_hk_axioms(P, F);
    for (auto& e : ax.entries) {
        INFO(e.family << " valid " << e.valid_order << " max " << e.max_residual);
        CHECK(e.exact_zero);
    }
    CanonicalReport c = check_canonical(P, F);
    CHECK(c.vm_minus_zero);
    CHECK(c.vpp_vanishes_on_slice);
    CHECK(c.canonical());
    CHECK(check_potentials_identities(P, F).ok());
    Prepotential back = extract_prepotential(P, F);
    CHECK(back.L.equal_upto(L.L, D));
}

namespace {
// Random valid prepotential for n = 1: terms of z-degree 3..4 plus a nilpotent quadratic piece.
Series random_prepotential(std::mt19937_64& rng, int D) {
    std::uniform_int_distribution<int> deg(3, 4), split(0, 4), cf(-3, 3), ue(0, 2);
    Series L(1, D, Coords::Analytic, 4);
    for (int t = 0; t < 4; ++t) {
        int k = deg(rng);
        int m1 = std::min(k, split(rng));
        int uc = 4 - k;
        int a = ue(rng), b = ue(rng), c = ue(rng);
        int dd = a + b - c - uc;
        if (dd < 0) continue;
        L += zminus(1, D, {m1, k - m1}, HP::reduce({{ukey(a, b, c, dd), GaussQ::rational(cf(rng), 7)}}));
    }
    L += zminus(1, D, {2, 0}, mono(2, 0, 0, 0, cf(rng), 5));
    return L;
}
}  // namespace

TEST_CASE("round trip on random prepotentials") {
    std::mt19937_64 rng(2024);
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 4;
    for (int t = 0; t < 10; ++t) {
        Series Lr = random_prepotential(rng, D);
        Prepotential L = validate_prepotential(Lr, d);
        Bridge B;
        HKFrame F = build_canonical_frame(P, L, &B);
        CHECK(bridge_residuals(P, L, B).ok());
        CHECK(check_potentials_identities(P, F).ok());
        Prepotential back = extract_prepotential(P, F);
        CHECK(back.L.equal_upto(L.L, kMaxOrder));
    }
}

TEST_CASE("u-independent random prepotentials give canonical frames") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> cf(-4, 4), split(0, 4);
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 5;
    for (int t = 0; t < 4; ++t) {
        Series Lr = Series::zero(1, D, 4);
        for (int j = 0; j < 3; ++j) {
            int m = split(rng);
            Lr += zminus(1, D, {m, 4 - m}, HP::constant(GaussQ::rational(cf(rng), 9)));
        }
        Prepotential L = validate_prepotential(Lr, d);
        HKFrame F = build_canonical_frame(P, L);
        CHECK(check_hk_axioms(P, F).ok());
        CHECK(check_canonical(P, F).canonical());
        CHECK(F.kind == FrameKind::Canonical);
    }
}

// For L = l (z-1)^2 z-2 u1+ the bracket [H++, H--] = H0 forces, at first order in l, the e0- component
// q^1 = l u1- z+1 z-1 + (l/2) u1+ (z+1)^2 of H--, hence v^{-1}_{-1} = -l (u1+ z+1 + u1- z-1) != 0.
TEST_CASE("u-dependent cubic prepotential leaves torsion in the normalised frame") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 4;
    Prepotential L = validate_prepotential(zminus(1, D, {2, 1}, mono(1, 0, 0, 0, 2, 5)), d);
    Bridge B;
    HKFrame F = build_canonical_frame(P, L, &B);
    CHECK(bridge_residuals(P, L, B).ok());
    Series v = F.em[0].coeff(ix_em(d, 0)) - Series::constant(1, D, HP::constant(GaussQ(1)));
    Series expect = Series::term(1, D, zunit(0), mono(1, 0, 0, 0, -2, 5)) +
                    Series::term(1, D, zunit(2), mono(0, 0, 1, 0, -2, 5));
    CHECK(v.truncated(1).equal_upto(expect.with_charge(0), 1));
    CHECK_FALSE(check_canonical(P, F).vm_minus_zero);
    CHECK(F.kind == FrameKind::General);
    for (const auto& e : check_hk_axioms(P, F).entries) {
        INFO(e.family);
        CHECK(e.exact_zero == (e.family != "[e+a,e-b] in span E"));
    }
    CHECK(extract_prepotential(P, F).L.equal_upto(L.L, kMaxOrder));
}

TEST_CASE("v+ is the linear form in z+ and the v-potential is the gradient") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 5;
    Prepotential L = validate_prepotential(quartic(D) + zminus(1, D, {3, 0}, mono(1, 0, 0, 0, 2, 3)), d);
    HKFrame F = build_canonical_frame(P, L);
    CanonicalReport c = check_canonical(P, F);
    const QMat& w = P.sym().omega_upper;
    for (int a = 0; a < 2; ++a) {
        Series grad = Series::zero(1, D, 3), lin = Series::zero(1, D, 1);
        for (int b = 0; b < 2; ++b) {
            if (!w(a, b).is_zero()) grad += d_z(-1, b, L.L).scaled(w(a, b));
            for (int cc = 0; cc < 2; ++cc)
                if (!w(a, cc).is_zero())
                    lin += (d_z(-1, b, d_z(-1, cc, L.L)) * Series::variable(1, D, b)).scaled(w(a, cc));
        }
        CHECK(c.v_potential[a].equal_upto(grad, D));
        CHECK(F.Hpp.coeff(ix_ep(d, a)).equal_upto(lin, D));
    }
}

TEST_CASE("curvature of the quartic benchmark") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 6;
    HKFrame F = build_canonical_frame(P, validate_prepotential(quartic(D), d));
    CurvatureData C = extract_curvature(P, F);
    CHECK(C.valid >= 4);
    bool nonzero = false;
    for (auto& r : C.R)
        for (auto& ab : r)
            for (auto& s : ab) nonzero = nonzero || !s.is_zero();
    CHECK(nonzero);
    CHECK(curvature_symmetry_residual(P, C) == 0.0);

    // linear prepotential: flat
    HKFrame Fl = build_canonical_frame(P, validate_prepotential(zminus(1, D, {1, 0}, mono(3, 0, 0, 0)) +
                                                                    zminus(1, D, {0, 1}, mono(2, 1, 0, 0, -2)), d));
    CHECK(check_hk_axioms(P, Fl).ok());
    CurvatureData Cl = extract_curvature(P, Fl);
    for (auto& r : Cl.R)
        for (auto& ab : r)
            for (auto& s : ab) CHECK(zero_upto_valid(s));
}

TEST_CASE("flat prepotential gives the flat frame") {
    for (int n = 1; n <= 2; ++n) {
        Dims d(n, n, 0);
        PAlgebra P(d);
        HKFrame F = build_canonical_frame(P, validate_prepotential(Series::zero(n, 6, 4), d));
        HKFrame F0 = flat_frame<GaussQ>(d, 6);
        for (int l = 0; l < d.dim_p(); ++l) CHECK((F.field(l) - F0.field(l)).is_zero_upto(6));
    }
}

TEST_CASE("pipeline error paths") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 3;
    // z-1 z-2 (u1+)^2 gives a diagonal, non-nilpotent A++(E)
    Prepotential L = validate_prepotential(zminus(1, D, {1, 1}, mono(2, 0, 0, 0)), d);
    CHECK_THROWS_AS(solve_bridge(P, L), Error);

    HKFrame F = flat_frame<GaussQ>(d, D);
    F.Hpp.set(ix_em(d, 0), zminus(1, D, {1, 0}, mono(2, 0, 0, 0)));
    try {
        extract_prepotential(P, F);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotClosed);
    }
}

TEST_CASE("build is deterministic and float backend agrees") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 5;
    Prepotential L = validate_prepotential(quartic(D), d);
    HKFrame A = build_canonical_frame(P, L), B = build_canonical_frame(P, L);
    for (int l = 0; l < d.dim_p(); ++l) CHECK(A.field(l).str() == B.field(l).str());

    auto Lf = validate_prepotential(L.L.convert<cplx>(), d);
    HKFrameF Ff = build_canonical_frame(P, Lf);
    CHECK(check_hk_axioms(P, Ff).ok(1e-10));
    for (int l = 0; l < d.dim_p(); ++l) {
        FrameFieldF diff = Ff.field(l) - A.field(l).convert<cplx>();
        CHECK(diff.max_abs_upto(D) < 1e-12);
    }
}

TEST_CASE("n = 2 prepotential") {
    Dims d(2, 1, 1);
    PAlgebra P(d);
    const int D = 4;
    ZKey k = zunit(4) * 2 + zunit(6) + zunit(7);
    Prepotential L = validate_prepotential(Series::term(2, D, k, HP::constant(GaussQ::rational(1, 3))), d);
    Bridge B;
    HKFrame F = build_canonical_frame(P, L, &B);
    CHECK(bridge_residuals(P, L, B).ok());
    CHECK(check_hk_axioms(P, F).ok());
    CHECK(check_canonical(P, F).canonical());
    CHECK(check_potentials_identities(P, F).ok());
    CHECK(curvature_symmetry_residual(P, extract_curvature(P, F)) == 0.0);
    CHECK(extract_prepotential(P, F).L.equal_upto(L.L, D));
}

// H++ p = c u2+^2 p with p(I2) = 1 is solved by p = exp(c u2+ u2-), which no u-degree bound captures.
TEST_CASE("quadratic prepotential with an exponential bridge overflows the u-degree bound") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    Prepotential L = validate_prepotential(zminus(1, 4, {1, 1}, mono(0, 2, 0, 0, 5, 7)), d);
    try {
        BridgeOptions o;
        o.max_iterations = 40;
        solve_bridge(P, L, o);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegreeOverflow);
    }
}
