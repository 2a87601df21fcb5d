#include "doctest.h"
#include "hk/jets.hpp"
#include "oracle.hpp"

using namespace hk;
using HP = HarmonicPoly;

namespace {
const Coords A = Coords::Analytic;
const Coords C = Coords::Central;

HP mono(int a, int b, int c, int d, long num = 1, long den = 1) {
    return HP::monomial(a, b, c, d, GaussQ::rational(num, den));
}
HP one() { return HP::constant(GaussQ(1)); }

// slot helpers for n = 1: z+1, z+2, z-1, z-2
ZKey zk(std::initializer_list<std::pair<int, int>> e) {
    ZKey k = 0;
    for (auto [slot, m] : e)
        for (int i = 0; i < m; ++i) k += zunit(slot);
    return k;
}

Series zm(int n, int order, int a, Coords c = A) { return Series::variable(n, order, 2 * n + a, c); }
Series zp(int n, int order, int a, Coords c = A) { return Series::variable(n, order, a, c); }

bool same(const Series& a, const Series& b) { return a.equal_upto(b, kMaxOrder); }

Series flat(const Dims& d, int label, const Series& s) { return apply_flat_field(d, label, s); }
}  // namespace

TEST_CASE("series arithmetic examples") {
    Series z1 = zm(1, 3, 0);
    CHECK(same(z1 + Series::zero(1, 3, 1), z1));
    Series p = zm(1, 3, 0) * zm(1, 3, 1);
    CHECK(p.charge() == 2);
    CHECK(p.terms().size() == 1);
    CHECK(p.coeff(zk({{2, 1}, {3, 1}})) == one());

    Series c1 = Series::constant(1, 1, one());
    Series a = c1 + zm(1, 1, 0).with_charge(std::nullopt);
    Series b = c1 - zm(1, 1, 0).with_charge(std::nullopt);
    Series ab = a * b;
    CHECK(same(ab, c1));
    CHECK(ab.valid() == 1);
    CHECK(c1.exact());

    CHECK_THROWS_AS(zm(1, 3, 0) + zp(1, 3, 0), Error);
    CHECK_THROWS_AS(zm(1, 3, 0) + zm(2, 3, 0), Error);
    CHECK_THROWS_AS(Series(1, kMaxOrder + 1), Error);
}

TEST_CASE("declared charge is checked on every term") {
    Series s(1, 3, A, 1);
    CHECK_NOTHROW(s.add_term(zk({{2, 1}}), one()));
    CHECK_THROWS_AS(s.add_term(zk({{0, 1}}), one()), Error);
    CHECK_THROWS_AS(s.add_term(0, mono(1, 0, 0, 0) + one()), Error);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        Series r = oracle::random_series(rng, 2, 4, t % 5 - 2, 6);
        Series q = r * oracle::random_series(rng, 2, 4, 1, 4);
        if (!q.is_zero()) CHECK(q.computed_charge() == q.charge());
    }
}

TEST_CASE("d_z examples") {
    Series sq = zm(1, 4, 0) * zm(1, 4, 0);
    CHECK(same(d_z(-1, 0, sq), (zm(1, 4, 0)).scaled(GaussQ(2))));
    CHECK(d_z(-1, 0, sq).charge() == 1);
    CHECK(d_z(+1, 0, sq).is_zero());
    Series L = Series::term(1, 4, zk({{2, 2}}), mono(2, 0, 0, 0));
    CHECK(L.charge() == 4);
    CHECK(d_z(-1, 0, L).charge() == 3);
    CHECK(d_z(+1, 0, zp(1, 4, 0)).charge() == 0);
    CHECK(d_z(-1, 0, sq.truncated(3)).valid() == 2);
    CHECK_THROWS_AS(d_z(-1, 2, sq), Error);
}

TEST_CASE("flat fields on analytic coordinates") {
    for (int n = 1; n <= 2; ++n) {
        Dims d(n, n, 0);
        for (int a = 0; a < 2 * n; ++a) {
            CHECK(flat(d, ix_Hpp(), zm(n, 3, a)).is_zero());
            CHECK(same(flat(d, ix_Hpp(), zp(n, 3, a)), zm(n, 3, a).scaled(GaussQ(-1)).with_charge(std::nullopt)));
            CHECK(flat(d, ix_Hmm(), zp(n, 3, a)).is_zero());
            CHECK(same(flat(d, ix_Hmm(), zm(n, 3, a)), zp(n, 3, a).scaled(GaussQ(-1)).with_charge(std::nullopt)));
            CHECK(same(flat(d, ix_H0(), zp(n, 3, a)), zp(n, 3, a).scaled(GaussQ(-1))));
        }
    }
}

TEST_CASE("analytic H++ agrees with the central coordinate oracle") {
    // Central coordinates z^{ia} are H++-inert, so the induced action on z^{±a} follows from
    // z^{+a} = u2- z^{1a} - u1- z^{2a} and u^i_- -> u^i_+.
    Dims d(1, 1, 0);
    auto zc = analytic_in_central<GaussQ>(1, 3);
    for (int a = 0; a < 2; ++a) {
        Series hp = flat(d, ix_Hpp(), zc[a].with_charge(std::nullopt));
        CHECK(same(to_analytic(hp), zm(1, 3, a).scaled(GaussQ(-1)).with_charge(std::nullopt)));
    }
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 2; ++n) {
        Dims dd(n, n, 0);
        for (int t = 0; t < 10; ++t) {
            Series s = oracle::random_series(rng, n, 3, t % 3 - 1, 5);
            for (int lab : {ix_Hpp(), ix_Hmm(), ix_H0(), ix_ep(dd, 0), ix_em(dd, 2 * n - 1)}) {
                Series direct = flat(dd, lab, s);
                Series routed = to_analytic(flat(dd, lab, to_central(s)));
                CHECK(same(direct, routed));
            }
        }
    }
}

TEST_CASE("coordinate changes are inverse to each other") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        Series s = oracle::random_series(rng, 1, 4, 2, 6);
        CHECK(same(to_analytic(to_central(s)), s));
    }
}

TEST_CASE("flat field commutators on random series") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 2; ++n) {
        Dims d(n, n, 0);
        auto F = [&](int lab, const Series& s) { return flat(d, lab, s); };
        for (int t = 0; t < 8; ++t) {
            Series s = oracle::random_series(rng, n, 4, t % 5 - 2, 6);
            auto comm = [&](int x, int y) { return F(x, F(y, s)) - F(y, F(x, s)); };
            CHECK(same(comm(ix_H0(), ix_Hpp()), F(ix_Hpp(), s).scaled(GaussQ(2))));
            CHECK(same(comm(ix_H0(), ix_Hmm()), F(ix_Hmm(), s).scaled(GaussQ(-2))));
            CHECK(same(comm(ix_Hpp(), ix_Hmm()), F(ix_H0(), s)));
            for (int a = 0; a < 2 * n; ++a) {
                CHECK(same(comm(ix_Hpp(), ix_em(d, a)), F(ix_ep(d, a), s)));
                CHECK(same(comm(ix_Hmm(), ix_ep(d, a)), F(ix_em(d, a), s)));
                CHECK(comm(ix_Hpp(), ix_ep(d, a)).is_zero());
                for (int b = 0; b < 2 * n; ++b) {
                    CHECK(comm(ix_ep(d, a), ix_ep(d, b)).is_zero());
                    CHECK(comm(ix_ep(d, a), ix_em(d, b)).is_zero());
                }
            }
        }
    }
}

TEST_CASE("E action needs an equivariance context") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    Series s = zm(1, 3, 0);
    CHECK(flat(d, ix_E(d, 0), s).is_zero());
    EquivarianceTag vec{1, 0};
    CHECK_THROWS_AS(apply_flat_field(d, ix_E(d, 0), s, vec), Error);

    // Constant upper vector c transforms as -E c, lower h as h E; the pairing is invariant.
    std::vector<Series> f, h;
    for (int a = 0; a < 2; ++a) {
        f.push_back(Series::constant(1, 2, HP::constant(GaussQ(a + 2))));
        h.push_back(Series::constant(1, 2, HP::constant(GaussQ(3 - 5 * a))));
    }
    for (int A0 = 0; A0 < P.N(); ++A0) {
        auto Ef = apply_E_tensor(P, A0, f, vec);
        auto Eh = apply_E_tensor(P, A0, h, EquivarianceTag{0, 1});
        Series pair = Ef[0] * h[0] + Ef[1] * h[1] + f[0] * Eh[0] + f[1] * Eh[1];
        CHECK(pair.is_zero());
        for (int a = 0; a < 2; ++a) {
            GaussQ expect = -(P.E(A0)(a, 0) * GaussQ(2) + P.E(A0)(a, 1) * GaussQ(3));
            CHECK(Ef[a].coeff(0).value_at_identity() == expect);
        }
    }
    CHECK_THROWS_AS(apply_E_tensor(P, 0, f, EquivarianceTag{1, 1}), Error);
}

TEST_CASE("substitute examples and multiplicativity") {
    const int n = 1, D = 4;
    std::vector<Series> id{zm(n, D, 0), zm(n, D, 1)};
    Series f = zm(n, D, 0) * zm(n, D, 0) + zm(n, D, 1) * zm(n, D, 0);
    CHECK(same(substitute(f, id), f));

    Series arg1 = zm(n, D, 0) + zm(n, D, 0).times(mono(1, 0, 1, 0, 3));
    Series sq = zm(n, D, 0) * zm(n, D, 0);
    Series got = substitute(sq, std::vector<Series>{arg1, zm(n, D, 1)});
    HP fac = one() + mono(1, 0, 1, 0, 3);
    CHECK(same(got, Series::term(n, D, zk({{2, 2}}), fac * fac)));
    CHECK(substitute(Series::zero(n, D, 2), id).is_zero());
    CHECK_THROWS_AS(substitute(f, std::vector<Series>{zm(n, D, 0)}), Error);
    CHECK_THROWS_AS(substitute(zp(n, D, 0), id), Error);

    std::mt19937_64 rng(9);
    for (int t = 0; t < 6; ++t) {
        Series g1 = Series::term(n, D, zk({{2, 1}}), mono(t % 2, 0, 0, t % 2)) + Series::term(n, D, zk({{3, 2}}), mono(0, 0, 1, 0));
        Series g2 = Series::term(n, D, zk({{3, 1}}), mono(1, 1, 0, 2)) * zm(n, D, 0);
        std::vector<Series> args{zm(n, D, 0) + zm(n, D, 0) * zm(n, D, 1).times(mono(0, 0, 1, 0, t + 1)),
                                 zm(n, D, 1) + sq.times(mono(0, 0, 1, 0, -1))};
        Series lhs = substitute(g1 * g2, args);
        Series rhs = substitute(g1, args) * substitute(g2, args);
        int v = std::min(lhs.valid(), rhs.valid());
        CHECK(lhs.equal_upto(rhs, std::min(v, D)));
    }
}

TEST_CASE("solve_charged in the flat case reproduces central coordinates") {
    const int n = 1, D = 3;
    auto zc = central_in_analytic<GaussQ>(n, D);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a) {
            Series init = Series::variable(n, D, i * 2 + a, C);
            Series f = solve_charged(Series::zero(n, D, 2), 0, init);
            CHECK(same(f, zc[i * 2 + a]));
        }
    CHECK_THROWS_AS(solve_charged(zm(n, D, 0), 0, Series::zero(n, D, 0, C)), Error);
}

TEST_CASE("solve_charged on a deformed source satisfies both constraints") {
    // L = lam (z-1)^2 (u1+)^2; the linearised bridge source for phi^{i2} is 2 lam (u1+)^2 z^{i1}
    // (omega^{21} = 1).
    const int n = 1, D = 3;
    const GaussQ lam = GaussQ::rational(3, 7);
    Dims d(n, n, 0);
    auto zc = central_in_analytic<GaussQ>(n, D);
    std::vector<Series> phi2;
    for (int i = 0; i < 2; ++i) {
        Series g = zc[i * 2 + 0].times(mono(2, 0, 0, 0)).scaled(GaussQ(2) * lam);
        Series init = Series::variable(n, D, i * 2 + 1, C);
        Series f = solve_charged(g, 0, init);
        CHECK(same(flat(d, ix_Hpp(), f), g));
        auto atI = to_central(f);
        for (const auto& [k, h] : atI.terms())
            CHECK(h.value_at_identity() == init.coeff(k).value_at_identity());
        phi2.push_back(f);
    }
    // phi^{-a} = -u2+ phi^{1a} + u1+ phi^{2a}
    Series phim = phi2[0].times(mono(0, 1, 0, 0, -1)) + phi2[1].times(mono(1, 0, 0, 0));
    Series expect = zm(n, D, 1) + zm(n, D, 0).times(mono(1, 0, 1, 0)).scaled(GaussQ(2) * lam);
    CHECK(same(phim, expect));
}

TEST_CASE("eval_series examples") {
    Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(4);
    z(2) = 2.0;
    CHECK(std::abs(eval_series(zm(1, 3, 0), I, z) - 2.0) < 1e-14);
    Series s = Series::term(1, 3, 0, mono(1, 0, 1, 0, 5)) + Series::term(1, 3, zk({{0, 1}, {2, 1}}), mono(1, 1, 1, 1));
    std::mt19937_64 rng(2);
    Eigen::Matrix2cd U = oracle::random_sl2(rng, 0.3);
    CHECK(std::abs(eval_series(s, U, Eigen::VectorXcd::Zero(4)) - 5.0 * U(0, 0) * U(0, 1)) < 1e-12);
    Eigen::Matrix2cd T;
    const double t = 1.7;
    T << t, 0, 0, 1.0 / t;
    Eigen::VectorXcd z1 = Eigen::VectorXcd::Zero(4);
    z1(2) = 1.0;
    CHECK(std::abs(eval_series(zm(1, 3, 0).times(mono(1, 0, 0, 0)), T, z1) - t) < 1e-14);
    CHECK_THROWS_AS(eval_series(zm(1, 3, 0), Eigen::Matrix2cd(2.0 * I), z), Error);
}

TEST_CASE("analytic and central evaluation agree") {
    std::mt19937_64 rng(13);
    Series s = oracle::random_series(rng, 1, 3, 1, 8);
    Series c = to_central(s);
    for (int t = 0; t < 5; ++t) {
        Eigen::Matrix2cd U = oracle::random_sl2(rng, 0.4);
        Eigen::VectorXcd za = Eigen::VectorXcd::Random(4);
        // z^{ia} = u^i_+ z^{+a} + u^i_- z^{-a}
        Eigen::VectorXcd zcen(4);
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < 2; ++a) zcen(i * 2 + a) = U(i, 0) * za(a) + U(i, 1) * za(2 + a);
        CHECK(std::abs(eval_series(s, U, za) - eval_series(c, U, zcen)) < 1e-10);
    }
}

TEST_CASE("Newton inversion") {
    const int n = 1, D = 3;
    Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    std::vector<SeriesF> id;
    for (int s = 0; s < 4; ++s) id.push_back(SeriesF::variable(n, D, s));
    Eigen::VectorXcd target(4);
    target << 0.1, -0.2, cplx(0.3, 0.1), 0.05;
    CHECK((invert_map_numeric(id, I, target) - target).norm() < 1e-14);

    std::vector<SeriesF> pert;
    for (auto& p : id) pert.push_back(p.with_charge(std::nullopt));
    pert[2] += SeriesF::variable(n, D, 2) * SeriesF::variable(n, D, 3).scaled(0.3);
    pert[3] += SeriesF::variable(n, D, 2) * SeriesF::variable(n, D, 2).scaled(-0.2);
    int iters = 0;
    std::mt19937_64 rng(4);
    Eigen::Matrix2cd U = oracle::random_sl2(rng, 0.2);
    Eigen::VectorXcd z = invert_map_numeric(pert, U, target, {}, &iters);
    Eigen::VectorXcd back(4);
    for (int i = 0; i < 4; ++i) back(i) = eval_series(pert[i], U, z);
    CHECK((back - target).norm() < 1e-12);
    CHECK(iters <= 5);

    std::vector<SeriesF> sing = id;
    // z-1 <- (z+1)^2 with z+1 = 0: the Jacobian row of z-1 vanishes
    sing[2] = (SeriesF::variable(n, D, 0) * SeriesF::variable(n, D, 0)).with_charge(std::nullopt);
    Eigen::VectorXcd t2 = Eigen::VectorXcd::Zero(4);
    t2(2) = 0.1;
    CHECK_THROWS_AS(invert_map_numeric(sing, I, t2), Error);
}
