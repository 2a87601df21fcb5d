#include "doctest.h"
#include "hk/geometry.hpp"

using namespace hk;
using HP = HarmonicPoly;

namespace {
Series zminus(int n, int D, std::vector<int> e, const GaussQ& c) {
    ZKey k = 0;
    for (int a = 0; a < int(e.size()); ++a)
        for (int i = 0; i < e[a]; ++i) k += zunit(2 * n + a);
    return Series::term(n, D, k, HP::constant(c));
}

struct Built {
    Bridge B;
    HKFrame F;
};

Built build(const Dims& d, const Series& L) {
    PAlgebra P(d);
    Built r;
    r.F = build_canonical_frame(P, validate_prepotential(L, d), &r.B);
    return r;
}

Built flat(const Dims& d) { return build(d, Series::zero(d.n, 6, 4)); }
Built quartic() { return build(Dims(1, 1, 0), zminus(1, 6, {2, 2}, GaussQ::rational(1, 10))); }
}  // namespace

TEST_CASE("tau basis gives the flat metric") {
    for (Dims d : {Dims(1, 1, 0), Dims(2, 1, 1), Dims(2, 2, 0)}) {
        Eigen::MatrixXcd V = tau_basis(d);
        CHECK(V.rows() == 4 * d.n);
        CHECK(Eigen::FullPivLU<Eigen::MatrixXcd>(V).rank() == 4 * d.n);
        Eigen::MatrixXd g = flat_metric(d);
        CHECK((g - g.transpose()).norm() == 0.0);
        int pos = 0;
        for (int i = 0; i < g.rows(); ++i) pos += g(i, i) > 0;
        CHECK(pos == 4 * d.p);
    }
}

TEST_CASE("flat chart reproduces the flat metric") {
    for (Dims d : {Dims(1, 1, 0), Dims(2, 1, 1)}) {
        Built b = flat(d);
        ManifoldChart C = integrate_manifold(b.F, b.B);
        CHECK(C.rank_at_origin == 4 * d.n);
        CHECK(C.closure_defect < 1e-10);
        Eigen::MatrixXd g0 = flat_metric(d);
        for (const auto& p : C.points) {
            MetricSample s = metric_at(C, p.x);
            CHECK((s.g - g0).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(s.signature == std::make_pair(4 * d.p, 4 * d.q));
            CHECK(s.section_diff < 1e-10);
            CHECK(in_tau_fixed_slice(d, p.z, 1e-10));
        }
        CHECK(reality_report(C, chart_sample(4 * d.n, 5, 0.1, 3)).ok());
        CHECK(ricci_fd(C, C.points[1].x).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("swapped pairing leaves the tau-fixed slice") {
    Dims d(2, 1, 1);
    Built b = flat(d);
    ChartOptions o;
    o.pairing = Pairing::Swapped;
    o.points = 5;
    bool off = false;
    try {
        ManifoldChart C = integrate_manifold(b.F, b.B, o);
        for (const auto& p : C.points) off = off || !in_tau_fixed_slice(d, p.z, 1e-8);
        off = off || !reality_report(C, chart_sample(8, 5, 0.1, 3)).ok();
    } catch (const Error&) {
        off = true;
    }
    CHECK(off);
}

TEST_CASE("flat chart coordinates map linearly") {
    Dims d(1, 1, 0);
    Built b = flat(d);
    ManifoldChart C = integrate_manifold(b.F, b.B);
    Eigen::VectorXd x = C.points[2].x, y = C.points[3].x;
    Eigen::VectorXcd lin = C.point(0.5 * x + 0.5 * y).z - 0.5 * (C.point(x).z + C.point(y).z);
    CHECK(lin.norm() < 1e-12);
}

TEST_CASE("chart errors") {
    Dims d(1, 1, 0);
    Built b = flat(d);
    ManifoldChart C = integrate_manifold(b.F, b.B);
    Eigen::VectorXd far = Eigen::VectorXd::Constant(4, 1.0);
    try {
        metric_at(C, far);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfChart);
    }

    Built q = quartic();
    ChartOptions o;
    o.radius = 1e4;
    o.points = 3;
    try {
        integrate_manifold(q.F, q.B, o);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FlowDiverged);
    }
}

TEST_CASE("twisted chart fails the reality check") {
    Built b = flat(Dims(1, 1, 0));
    ManifoldChart C = integrate_manifold(b.F, b.B);
    auto xs = chart_sample(4, 3, 0.1, 5);
    CHECK(reality_report(C, xs).ok());
    CHECK_FALSE(reality_report(twisted(C, 0.3), xs).ok());
}

TEST_CASE("quartic chart") {
    Built q = quartic();
    ManifoldChart C = integrate_manifold(q.F, q.B);
    CHECK(C.rank_at_origin == 4);
    MetricSample s0 = metric_at(C, C.points[0].x);
    CHECK((s0.g - flat_metric(C.d)).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 1; i < 4; ++i) {
        MetricSample s = evaluate_metric(C, C.points[i].x);
        CHECK(s.asym_max < 1e-12);
        CHECK(s.signature == std::make_pair(4, 0));
        CHECK(s.section_diff < 1e-8);
        // The tau-real frame vectors leave sp(1,0) away from the origin; see the ledger.
        CHECK(s.vertical_defect > 0.0);
    }
}

TEST_CASE("serial and parallel sampling agree bit for bit") {
    Built q = quartic();
    ChartOptions o;
    o.points = 8;
    o.parallel = false;
    ManifoldChart Cs = integrate_manifold(q.F, q.B, o);
    o.parallel = true;
    ManifoldChart Cp = integrate_manifold(q.F, q.B, o);
    for (int i = 0; i < o.points; ++i) CHECK(Cs.points[i].z == Cp.points[i].z);
    std::vector<Eigen::VectorXd> xs;
    for (const auto& p : Cs.points) xs.push_back(p.x);
    CHECK_THROWS_AS(metric_samples(Cs, xs, {}, true), Error);

    Built f = flat(Dims(2, 1, 1));
    ManifoldChart C = integrate_manifold(f.F, f.B, o);
    xs.clear();
    for (const auto& p : C.points) xs.push_back(p.x);
    auto a = metric_samples(C, xs, {}, false), b = metric_samples(C, xs, {}, true);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(a[i].g == b[i].g);
}

TEST_CASE("chart_sample is deterministic and inside the ball") {
    auto a = chart_sample(8, 10, 0.2, 11), b = chart_sample(8, 10, 0.2, 11);
    CHECK(a[0].norm() == 0.0);
    for (int i = 0; i < 10; ++i) {
        CHECK(a[i] == b[i]);
        CHECK(a[i].norm() <= 0.2);
    }
}
