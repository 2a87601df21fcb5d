#include "doctest.h"
#include "hk/frames.hpp"
#include "oracle.hpp"

using namespace hk;
using HP = HarmonicPoly;

namespace {
HP mono(int a, int b, int c, int d, long num = 1, long den = 1) {
    return HP::monomial(a, b, c, d, GaussQ::rational(num, den));
}

Series term(int n, int order, std::initializer_list<std::pair<int, int>> e, const HP& h) {
    ZKey k = 0;
    for (auto [slot, m] : e)
        for (int i = 0; i < m; ++i) k += zunit(slot);
    return Series::term(n, order, k, h);
}

FrameField random_field(std::mt19937_64& rng, const Dims& d, int order, int charge) {
    std::uniform_int_distribution<int> pick(0, 2);
    FrameField X(d, order, charge);
    for (int l = 0; l < d.dim_p(); ++l) {
        if (pick(rng) != 0) continue;
        X.set(l, oracle::random_series(rng, d.n, order, charge - label_charge(d, l), 2));
    }
    X.mark_invariant();
    return X;
}

bool zero_field(const FrameField& X) { return X.is_zero_upto(std::min(X.valid(), X.order())); }
}  // namespace

TEST_CASE("brackets of flat fields") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 3;
    auto F = [&](int l) { return FrameField::flat(d, D, l); };
    CHECK(zero_field(lie_bracket(P, F(ix_Hpp()), F(ix_Hmm())) - F(ix_H0())));
    for (int l = 0; l < d.dim_p(); ++l) CHECK(zero_field(lie_bracket(P, F(l), F(l))));
    FrameField X = F(ix_Hpp());
    X.set(ix_em(d, 1), term(1, D, {{2, 1}}, mono(2, 0, 0, 0, 3)));
    for (int a = 0; a < 2; ++a) CHECK(zero_field(lie_bracket(P, X, F(ix_ep(d, a)))));
    CHECK(!zero_field(lie_bracket(P, X, F(ix_em(d, 0))) - F(ix_ep(d, 0))));
}

TEST_CASE("flat frame satisfies every axiom") {
    for (int n = 1; n <= 2; ++n) {
        Dims d(n, n, 0);
        PAlgebra P(d);
        HKFrame F = flat_frame<GaussQ>(d, 3);
        ResidualReport r = check_hk_axioms(P, F);
        CHECK(r.entries.size() == 15);
        CHECK(r.ok());
        CurvatureData C = extract_curvature(P, F);
        for (auto& row : C.R)
            for (auto& ab : row)
                for (auto& s : ab) CHECK(s.is_zero());
        CanonicalReport c = check_canonical(P, F);
        CHECK(c.canonical());
        for (auto& v : c.v_potential) CHECK(v.is_zero());
        CHECK(check_potentials_identities(P, F).ok());
        std::vector<std::pair<Eigen::Matrix2cd, Eigen::VectorXcd>> pts{
            {Eigen::Matrix2cd::Identity(), Eigen::VectorXcd::Zero(4 * n)}};
        CHECK(frame_rank(F, pts) == d.dim_p());
    }
}

TEST_CASE("perturbed frames are detected") {
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 3;
    HKFrame F = flat_frame<GaussQ>(d, D);
    // z+-dependent noise on e-1
    F.em[0].set(ix_ep(d, 1), term(1, D, {{0, 1}, {1, 1}}, HP::constant(GaussQ(1))));
    F.attach_equivariance();
    ResidualReport r = check_hk_axioms(P, F);
    CHECK(!r.ok());
    bool seen = false;
    for (auto& e : r.entries)
        if (e.family == "[H++,e-a]=e+a") seen = !e.exact_zero;
    CHECK(seen);

    HKFrame T = flat_frame<GaussQ>(d, D);
    T.em[0].set(ix_em(d, 0), Series::constant(1, D, HP::constant(GaussQ(1))) + term(1, D, {{0, 1}}, mono(1, 0, 0, 0)));
    T.attach_equivariance();
    CHECK_THROWS_AS(extract_curvature(P, T), Error);

    HKFrame A = flat_frame<GaussQ>(d, D);
    A.Hpp.set(ix_em(d, 0), term(1, D, {{2, 1}}, mono(2, 0, 0, 0)));
    A.attach_equivariance();
    ResidualReport pr = check_potentials_identities(P, A);
    bool broken = false;
    for (auto& e : pr.entries)
        if (e.family == "omega symmetry of e-a v-c") broken = !e.exact_zero;
    CHECK(broken);

    HKFrame C = flat_frame<GaussQ>(d, D);
    C.Hpp.set(ix_H0(), term(1, D, {{2, 1}, {0, 1}}, mono(2, 0, 0, 0)));
    CHECK(!check_canonical(P, C).canonical());
}

TEST_CASE("Jacobi identity on random invariant fields") {
    std::mt19937_64 rng(17);
    Dims d(1, 1, 0);
    PAlgebra P(d);
    const int D = 3;
    for (int t = 0; t < 50; ++t) {
        FrameField X = random_field(rng, d, D, 2);
        FrameField Y = random_field(rng, d, D, 0);
        FrameField Z = random_field(rng, d, D, -1);
        FrameField j = lie_bracket(P, X, lie_bracket(P, Y, Z)) + lie_bracket(P, Y, lie_bracket(P, Z, X)) +
                       lie_bracket(P, Z, lie_bracket(P, X, Y));
        CHECK(j.charge() == 1);
        CHECK(zero_field(j));
        FrameField a = lie_bracket(P, X, Y) + lie_bracket(P, Y, X);
        CHECK(zero_field(a));
    }
}

TEST_CASE("bracket charge is additive") {
    std::mt19937_64 rng(19);
    Dims d(2, 1, 1);
    PAlgebra P(d);
    for (int t = 0; t < 5; ++t) {
        FrameField X = random_field(rng, d, 2, t - 2);
        FrameField Y = random_field(rng, d, 2, 1);
        FrameField b = lie_bracket(P, X, Y);
        CHECK(b.charge() == t - 1);
        for (const auto& [l, c] : b.coeffs())
            if (!c.is_zero()) CHECK(c.computed_charge() == t - 1 - label_charge(d, l));
    }
}
