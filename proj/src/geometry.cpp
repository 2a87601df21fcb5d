#include "hk/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

namespace hk {

namespace {

inline cplx num(const GaussQ& q) { return q.to_complex(); }
inline cplx num(const cplx& c) { return c; }

Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXd r(2 * m.rows(), m.cols());
    r << m.real(), m.imag();
    return r;
}

int numeric_rank(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

Eigen::Matrix2cd random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    cplx a(g(rng), g(rng)), b(g(rng), g(rng));
    double r = std::sqrt(std::norm(a) + std::norm(b));
    a /= r;
    b /= r;
    Eigen::Matrix2cd U;
    U << a, -std::conj(b), b, std::conj(a);
    return U;
}

template <class F>
void for_points(int count, bool parallel, F&& body) {
    std::vector<std::exception_ptr> errs(count);
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace

cplx NumPoly::eval(const Eigen::VectorXcd& z) const {
    cplx r = 0.0;
    for (const auto& [e, c] : terms) {
        cplx t = c;
        for (int i = 0; i < nvars; ++i)
            for (int k = 0; k < e[i]; ++k) t *= z(i);
        r += t;
    }
    return r;
}

NumPoly NumPoly::derivative(int slot) const {
    NumPoly r;
    r.nvars = nvars;
    for (const auto& [e, c] : terms) {
        if (!e[slot]) continue;
        auto f = e;
        --f[slot];
        r.terms.emplace_back(f, c * double(e[slot]));
    }
    return r;
}

int NumPoly::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms) {
        int s = 0;
        for (int x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

template <class S>
NumPoly at_identity_poly(const SeriesT<S>& s) {
    NumPoly p;
    p.nvars = s.nvars();
    for (const auto& [k, h] : s.terms()) {
        cplx c = num(h.value_at_identity());
        if (c == 0.0) continue;
        std::vector<int> e(p.nvars);
        for (int i = 0; i < p.nvars; ++i) e[i] = zexp(k, i);
        p.terms.emplace_back(std::move(e), c);
    }
    return p;
}

Eigen::MatrixXcd SliceFrame::matrix(const Eigen::VectorXcd& z) const {
    Eigen::MatrixXcd M(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int l = 0; l < dim; ++l) M(r, l) = c[r][l].eval(z);
    return M;
}

Eigen::MatrixXcd SliceFrame::em_z(const Eigen::VectorXcd& z) const {
    const int n2 = 2 * d.n;
    Eigen::MatrixXcd X(2 * n2, n2);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            X(b, a) = c[ix_em(d, a)][ix_ep(d, b)].eval(z);
            X(n2 + b, a) = c[ix_em(d, a)][ix_em(d, b)].eval(z);
        }
    return X;
}

std::vector<Eigen::MatrixXcd> SliceFrame::em_z_jacobian(const Eigen::VectorXcd& z) const {
    const int m = 4 * d.n;
    std::vector<Eigen::MatrixXcd> r;
    for (const auto& blk : dem) {
        Eigen::MatrixXcd J(m, m);
        for (int t = 0; t < m; ++t)
            for (int k = 0; k < m; ++k) J(k, t) = blk[t * m + k].eval(z);
        r.push_back(std::move(J));
    }
    return r;
}

template <class S>
SliceFrame slice_frame(const HKFrameT<S>& F) {
    SliceFrame sf;
    sf.d = F.d;
    sf.dim = F.d.dim_p();
    const int n2 = 2 * F.d.n, m = 2 * n2;
    sf.c.resize(sf.dim);
    for (int r = 0; r < sf.dim; ++r)
        for (int l = 0; l < sf.dim; ++l) sf.c[r].push_back(at_identity_poly(F.field(r).coeff(l)));
    for (int a = 0; a < n2; ++a) {
        std::vector<NumPoly> comp;
        for (int b = 0; b < n2; ++b) comp.push_back(sf.c[ix_em(F.d, a)][ix_ep(F.d, b)]);
        for (int b = 0; b < n2; ++b) comp.push_back(sf.c[ix_em(F.d, a)][ix_em(F.d, b)]);
        std::vector<NumPoly> blk;
        for (int t = 0; t < m; ++t)
            for (int k = 0; k < m; ++k) blk.push_back(comp[k].derivative(t));
        sf.dem.push_back(std::move(blk));
    }
    return sf;
}

Eigen::MatrixXd pairing_matrix(const Dims& d, Pairing pr) {
    Eigen::MatrixXd J = to_eigen(make_symplectic(d).Jhat0).real();
    return pr == Pairing::Standard ? Eigen::MatrixXd(J.transpose()) : J;
}

Eigen::MatrixXcd tau_basis(const Dims& d, Pairing pr) {
    const int n2 = 2 * d.n;
    Eigen::MatrixXd K = pairing_matrix(d, pr);
    const cplx I(0.0, 1.0);
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(2 * n2, 2 * n2);
    for (int a = 0; a < n2; ++a) {
        V(a, a) = 1.0;
        V(a, n2 + a) = I;
        for (int e = 0; e < n2; ++e) {
            V(n2 + e, a) = K(a, e);
            V(n2 + e, n2 + a) = -I * K(a, e);
        }
    }
    return V;
}

Eigen::MatrixXd flat_metric(const Dims& d) {
    const int m = 4 * d.n;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    for (int I = 0; I < m; ++I) g(I, I) = (I % d.n) < d.p ? 1.0 : -1.0;
    return g;
}

Eigen::MatrixXcd ManifoldChart::generators(const Eigen::VectorXcd& z) const { return A + frame.em_z(z) * Bm; }

namespace {

// One RK4 step of the generator k, carrying the tangent columns W along.
void rk4_step(const ManifoldChart& C, int k, double h, Eigen::VectorXcd& z, Eigen::MatrixXcd& W) {
    auto f = [&](const Eigen::VectorXcd& y, const Eigen::MatrixXcd& V, Eigen::VectorXcd& dy, Eigen::MatrixXcd& dV) {
        dy = C.A.col(k) + C.frame.em_z(y) * C.Bm.col(k);
        if (V.cols() == 0) {
            dV = V;
            return;
        }
        auto J = C.frame.em_z_jacobian(y);
        Eigen::MatrixXcd Jk = Eigen::MatrixXcd::Zero(y.size(), y.size());
        for (int a = 0; a < int(J.size()); ++a) Jk += C.Bm(a, k) * J[a];
        dV = Jk * V;
    };
    Eigen::VectorXcd k1, k2, k3, k4;
    Eigen::MatrixXcd l1, l2, l3, l4;
    f(z, W, k1, l1);
    f(z + 0.5 * h * k1, W + 0.5 * h * l1, k2, l2);
    f(z + 0.5 * h * k2, W + 0.5 * h * l2, k3, l3);
    f(z + h * k3, W + h * l3, k4, l4);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (W.cols()) W += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

void flow(const ManifoldChart& C, int k, double t, Eigen::VectorXcd& z, Eigen::MatrixXcd& W) {
    if (t == 0.0) return;
    const double h = t / C.opt.steps;
    for (int s = 0; s < C.opt.steps; ++s) {
        rk4_step(C, k, h, z, W);
        if (!z.allFinite() || z.cwiseAbs().maxCoeff() > C.opt.escape)
            throw Error(ErrorKind::FlowDiverged, "flow of generator " + std::to_string(k) + " left the polydisc");
    }
}

}  // namespace

ChartPoint ManifoldChart::point(const Eigen::VectorXd& x) const {
    const int m = 4 * d.n, n2 = 2 * d.n;
    if (x.size() != m) throw Error(ErrorKind::ShapeMismatch, "chart point needs 4n coordinates");
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(m);
    Eigen::MatrixXcd W(m, 0);
    for (int k = 0; k < m; ++k) {
        flow(*this, k, x(k), z, W);
        W.conservativeResize(m, k + 1);
        W.col(k) = A.col(k) + frame.em_z(z) * Bm.col(k);
    }
    ChartPoint p;
    p.x = x;
    p.z = twist * z;
    Eigen::MatrixXcd T = twist * W;
    p.w.resize(m);
    Eigen::MatrixXcd J(m, m);
    for (int s = 0; s < m; ++s) {
        p.w(s) = phi[s].eval(p.z);
        for (int t = 0; t < m; ++t) J(s, t) = dphi[s * m + t].eval(p.z);
    }
    p.T = J * T;
    double def = 0.0;
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) def = std::max(def, std::abs(Phi[a][b].eval(p.z) - (a == b ? 1.0 : 0.0)));
    p.slice_defect = def;
    return p;
}

std::vector<Eigen::VectorXd> chart_sample(int dim, int count, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Eigen::VectorXd> r;
    if (count > 0) r.push_back(Eigen::VectorXd::Zero(dim));
    while (int(r.size()) < count) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = g(rng);
        v *= radius * std::pow(u(rng), 1.0 / dim) / v.norm();
        r.push_back(v);
    }
    return r;
}

template <class S>
ManifoldChart integrate_manifold(const HKFrameT<S>& F, const BridgeT<S>& B, const ChartOptions& opt) {
    if (opt.steps < 1 || opt.radius <= 0.0 || opt.max_samples < 1)
        throw Error(ErrorKind::BadDimensions, "chart options out of range");
    ManifoldChart C;
    C.d = F.d;
    C.opt = opt;
    const int n2 = 2 * C.d.n, m = 2 * n2;
    C.frame = slice_frame(F);
    for (int s = 0; s < m; ++s) C.phi.push_back(at_identity_poly(B.phi_ia[s]));
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) C.dphi.push_back(C.phi[s].derivative(t));
    C.Phi.resize(n2);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) C.Phi[a].push_back(at_identity_poly(B.Phi[a][b]));
    PAlgebra P(C.d);
    for (int A = 0; A < P.N(); ++A) C.Ebasis.push_back(to_eigen(P.E(A)));

    // Candidates e(+,a) + K e(-,.) and e(-,a) - K e(+,.) at each sampled U, as (constant, em_z weights).
    Eigen::MatrixXd K = pairing_matrix(C.d, opt.pairing);
    const Eigen::VectorXcd z0 = Eigen::VectorXcd::Zero(m);
    const Eigen::MatrixXcd X0 = C.frame.em_z(z0);
    std::vector<Eigen::VectorXcd> alpha, beta;
    Eigen::MatrixXd M(2 * m, 0);
    std::mt19937_64 rng(opt.seed);
    int rank = 0;
    for (int s = 0; s < opt.max_samples && rank < m; ++s) {
        Eigen::Matrix2cd U = s == 0 ? Eigen::Matrix2cd::Identity() : random_su2(rng);
        C.samples.push_back(U);
        const cplx u1p = U(0, 0), u2p = U(1, 0), u1m = U(0, 1), u2m = U(1, 1);
        for (int fam = 0; fam < 2; ++fam)
            for (int a = 0; a < n2; ++a) {
                Eigen::VectorXcd al = Eigen::VectorXcd::Zero(m), be = Eigen::VectorXcd::Zero(n2);
                for (int c = 0; c < n2; ++c) {
                    double del = a == c ? 1.0 : 0.0;
                    if (fam == 0) {
                        al(c) = u1p * del + u1m * K(a, c);
                        be(c) = u2p * del + u2m * K(a, c);
                    } else {
                        al(c) = u1m * del - u1p * K(a, c);
                        be(c) = u2m * del - u2p * K(a, c);
                    }
                }
                alpha.push_back(al);
                beta.push_back(be);
                M.conservativeResize(2 * m, M.cols() + 1);
                M.col(M.cols() - 1) = realify(al + X0 * be);
            }
        rank = numeric_rank(M, opt.rank_tol);
    }
    C.rank_at_origin = rank;
    if (rank < m)
        throw Error(ErrorKind::RankDeficient, "distribution rank " + std::to_string(rank) + " after " +
                                                  std::to_string(C.samples.size()) + " U samples");
    if (rank > m)
        throw Error(ErrorKind::RankDeficient, "distribution rank " + std::to_string(rank) + " exceeds 4n; not tau-real");

    // Generators fitted at the origin to the flat tau-real basis.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(opt.rank_tol);
    Eigen::MatrixXd mix = cod.solve(realify(tau_basis(C.d, opt.pairing)));
    C.A = Eigen::MatrixXcd::Zero(m, m);
    C.Bm = Eigen::MatrixXcd::Zero(n2, m);
    for (int j = 0; j < int(alpha.size()); ++j)
        for (int k = 0; k < m; ++k) {
            C.A.col(k) += mix(j, k) * alpha[j];
            C.Bm.col(k) += mix(j, k) * beta[j];
        }
    if (numeric_rank(realify(C.generators(z0)), opt.rank_tol) < m)
        throw Error(ErrorKind::RankDeficient, "fitted generators are degenerate at the origin");

    // Closure of adjacent flow pairs against the distribution.
    const double s = opt.radius / 2;
    for (int k = 0; k + 1 < m; ++k) {
        Eigen::VectorXcd za = z0, zb = z0;
        Eigen::MatrixXcd W(m, 0);
        flow(C, k, s, za, W);
        flow(C, k + 1, s, za, W);
        flow(C, k + 1, s, zb, W);
        flow(C, k, s, zb, W);
        Eigen::MatrixXd G = realify(C.generators(za));
        Eigen::VectorXd dv(2 * m);
        dv << (za - zb).real(), (za - zb).imag();
        Eigen::VectorXd res = dv - G * G.colPivHouseholderQr().solve(dv);
        C.closure_defect = std::max(C.closure_defect, res.norm() / (s * s));
    }

    auto xs = chart_sample(m, opt.points, opt.radius, opt.seed);
    C.points.resize(xs.size());
    for_points(int(xs.size()), opt.parallel, [&](int i) { C.points[i] = C.point(xs[i]); });
    return C;
}

ManifoldChart twisted(const ManifoldChart& C, double angle) {
    ManifoldChart r = C;
    r.twist = C.twist * std::polar(1.0, angle);
    for (auto& p : r.points) p = r.point(p.x);
    return r;
}

namespace {

struct Coframe {
    Eigen::MatrixXcd M;     // frame matrix at w
    Eigen::MatrixXcd Minv;
};

Coframe coframe_at(const ManifoldChart& C, const ChartPoint& p) {
    Coframe cf;
    cf.M = C.frame.matrix(p.w);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cf.M);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw Error(ErrorKind::SingularFrame, "frame matrix is singular");
    cf.Minv = cf.M.inverse();
    return cf;
}

// -1/2 w_cd (e^{+c} (x) e^{-d} - e^{-c} (x) e^{+d}) on the columns of T.
Eigen::MatrixXcd coframe_metric(const ManifoldChart& C, const Coframe& cf, const Eigen::MatrixXcd& T) {
    const Dims& d = C.d;
    const int n2 = 2 * d.n, m = 2 * n2;
    Eigen::MatrixXcd vflat = Eigen::MatrixXcd::Zero(C.frame.dim, m);
    for (int b = 0; b < n2; ++b) {
        vflat.row(ix_ep(d, b)) = T.row(b);
        vflat.row(ix_em(d, b)) = T.row(n2 + b);
    }
    Eigen::MatrixXcd th = cf.Minv.transpose() * vflat;
    Eigen::MatrixXcd tp(n2, m), tm(n2, m);
    for (int c = 0; c < n2; ++c) {
        tp.row(c) = th.row(ix_ep(d, c));
        tm.row(c) = th.row(ix_em(d, c));
    }
    Eigen::MatrixXcd w = to_eigen(make_symplectic(d).omega_lower);
    return -0.5 * (tp.transpose() * w * tm - tm.transpose() * w * tp);
}

struct Vielbein {
    Eigen::MatrixXcd g;
    double tangency = 0.0;
    double vertical = 0.0;
};

// Metric for which pi_* of the frame vectors with coefficients V (columns, on e(+), e(-)) is orthonormal.
Vielbein vielbein_metric(const ManifoldChart& C, const Coframe& cf, const Eigen::MatrixXcd& T,
                         const Eigen::MatrixXcd& V) {
    const Dims& d = C.d;
    const int n2 = 2 * d.n, m = 2 * n2;
    Eigen::MatrixXcd rows(m, C.frame.dim);
    for (int a = 0; a < n2; ++a) {
        rows.row(a) = cf.M.row(ix_ep(d, a));
        rows.row(n2 + a) = cf.M.row(ix_em(d, a));
    }
    Eigen::MatrixXcd full = rows.transpose() * V;  // dim x 4n
    Eigen::MatrixXcd dz(m, m);
    for (int b = 0; b < n2; ++b) {
        dz.row(b) = full.row(ix_ep(d, b));
        dz.row(n2 + b) = full.row(ix_em(d, b));
    }
    Vielbein r;
    Eigen::MatrixXcd I2 = eta_block(d);
    for (int I = 0; I < m; ++I) {
        Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n2, n2);
        for (int A = 0; A < int(C.Ebasis.size()); ++A) X += full(ix_E(d, A), I) * C.Ebasis[A];
        r.vertical = std::max(r.vertical, (X.adjoint() * I2 + I2 * X).cwiseAbs().maxCoeff());
    }
    Eigen::MatrixXd Tr = realify(T), Dr = realify(dz);
    Eigen::MatrixXd K = Tr.colPivHouseholderQr().solve(Dr);
    r.tangency = (Tr * K - Dr).cwiseAbs().maxCoeff();
    Eigen::MatrixXd Ki = K.inverse();
    r.g = (Ki.transpose() * flat_metric(d) * Ki).cast<cplx>();
    return r;
}

Eigen::MatrixXcd section_element(const ManifoldChart& C, const MetricOptions& opt) {
    const int n2 = 2 * C.d.n;
    std::mt19937_64 rng(opt.section_seed);
    std::normal_distribution<double> g(0.0, opt.section_scale);
    Eigen::MatrixXcd X0 = Eigen::MatrixXcd::Zero(n2, n2);
    for (const auto& E : C.Ebasis) X0 += cplx(g(rng), g(rng)) * E;
    Eigen::MatrixXcd I2 = eta_block(C.d);
    Eigen::MatrixXcd X = 0.5 * (X0 - I2 * X0.adjoint() * I2);
    Eigen::MatrixXcd w = to_eigen(make_symplectic(C.d).omega_lower);
    if ((X.transpose() * w + w * X).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(ErrorKind::Inconsistent, "real form of sp_n left the algebra");
    return X.exp();
}

std::pair<int, int> signature_of(const Eigen::MatrixXd& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    const auto& ev = es.eigenvalues();
    double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > tol) ++pos;
        else if (ev(i) < -tol) ++neg;
    }
    return {pos, neg};
}

void check_in_chart(const ManifoldChart& C, const Eigen::VectorXd& x) {
    if (x.size() != 4 * C.d.n) throw Error(ErrorKind::ShapeMismatch, "chart point needs 4n coordinates");
    if (x.norm() > C.opt.radius * (1.0 + 1e-12)) throw Error(ErrorKind::OutOfChart, "point outside the chart radius");
}

}  // namespace

MetricSample evaluate_metric(const ManifoldChart& C, const Eigen::VectorXd& x, const MetricOptions& opt) {
    check_in_chart(C, x);
    const int n2 = 2 * C.d.n;
    ChartPoint p = C.point(x);
    Coframe cf = coframe_at(C, p);
    Eigen::MatrixXcd gc = coframe_metric(C, cf, p.T);
    Eigen::MatrixXcd V = tau_basis(C.d, C.opt.pairing);
    Vielbein vb = vielbein_metric(C, cf, p.T, V);
    Eigen::MatrixXcd h = section_element(C, opt);
    Eigen::MatrixXcd hh = Eigen::MatrixXcd::Zero(2 * n2, 2 * n2);
    hh.topLeftCorner(n2, n2) = h;
    hh.bottomRightCorner(n2, n2) = h;
    Vielbein vs = vielbein_metric(C, cf, p.T, hh * V);

    MetricSample s;
    s.x = x;
    s.g = gc.real();
    s.imag_max = gc.imag().cwiseAbs().maxCoeff();
    s.asym_max = (gc - gc.transpose()).cwiseAbs().maxCoeff();
    s.route_diff = (gc - vb.g).cwiseAbs().maxCoeff();
    s.section_diff = (vs.g - vb.g).cwiseAbs().maxCoeff();
    s.tangency = std::max(vb.tangency, vs.tangency);
    s.vertical_defect = std::max(vb.vertical, vs.vertical);
    s.signature = signature_of(s.g);
    return s;
}

MetricSample metric_at(const ManifoldChart& C, const Eigen::VectorXd& x, const MetricOptions& opt) {
    MetricSample s = evaluate_metric(C, x, opt);
    if (s.route_diff > opt.tol || s.tangency > opt.tol)
        throw Error(ErrorKind::RouteMismatch, "coframe and vielbein metrics differ by " + std::to_string(s.route_diff) +
                                                  ", tangency " + std::to_string(s.tangency));
    if (s.section_diff > opt.tol)
        throw Error(ErrorKind::RouteMismatch, "metric depends on the section: " + std::to_string(s.section_diff));
    return s;
}

std::vector<MetricSample> metric_samples(const ManifoldChart& C, const std::vector<Eigen::VectorXd>& xs,
                                         const MetricOptions& opt, bool parallel) {
    std::vector<MetricSample> r(xs.size());
    for_points(int(xs.size()), parallel, [&](int i) { r[i] = metric_at(C, xs[i], opt); });
    return r;
}

bool RealityReport::ok() const {
    for (const auto& p : points)
        if (!p.ok) return false;
    return !points.empty();
}

RealityReport reality_report(const ManifoldChart& C, const std::vector<Eigen::VectorXd>& xs, double tol) {
    const Dims& d = C.d;
    const int n2 = 2 * d.n, m = 2 * n2;
    Eigen::MatrixXcd I2 = eta_block(d);
    // real sp(p,q) spanned by the tau-averages of E_A and i E_A
    std::vector<Eigen::MatrixXcd> vert;
    for (const auto& E : C.Ebasis)
        for (cplx c : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
            Eigen::MatrixXcd Y = c * E;
            vert.push_back(0.5 * (Y - I2 * Y.adjoint() * I2));
        }
    const int nb = n2 * n2;
    RealityReport rep;
    for (const auto& x : xs) {
        RealityPoint rp;
        rp.x = x;
        MetricSample s = evaluate_metric(C, x);
        ChartPoint p = C.point(x);
        Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(m + nb, m + int(vert.size()));
        cols.topLeftCorner(m, m) = p.T;
        for (int j = 0; j < int(vert.size()); ++j)
            cols.block(m, m + j, nb, 1) = Eigen::Map<const Eigen::VectorXcd>(vert[j].data(), nb);
        rp.transversal_rank = numeric_rank(realify(cols), 1e-10);
        int vrank = numeric_rank(realify(cols.rightCols(vert.size())), 1e-10);
        rp.imag_max = s.imag_max;
        rp.signature = s.signature;
        rp.ok = rp.transversal_rank == m + vrank && rp.imag_max <= tol &&
                rp.signature == std::make_pair(4 * d.p, 4 * d.q);
        rep.points.push_back(rp);
    }
    return rep;
}

Eigen::MatrixXd ricci_fd(const ManifoldChart& C, const Eigen::VectorXd& x, double h) {
    const int m = 4 * C.d.n;
    auto g_at = [&](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
        ChartPoint p = C.point(y);
        Coframe cf = coframe_at(C, p);
        return coframe_metric(C, cf, p.T).real();
    };
    using Gamma = std::vector<Eigen::MatrixXd>;  // G[k](i, j)
    auto gamma_at = [&](const Eigen::VectorXd& y) -> Gamma {
        std::vector<Eigen::MatrixXd> dg(m);
        for (int l = 0; l < m; ++l) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
            e(l) = h;
            dg[l] = (g_at(y + e) - g_at(y - e)) / (2 * h);
        }
        Eigen::MatrixXd gi = g_at(y).inverse();
        Gamma G(m, Eigen::MatrixXd::Zero(m, m));
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < m; ++l) acc += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                    G[k](i, j) = 0.5 * acc;
                }
        return G;
    };
    Gamma G = gamma_at(x);
    std::vector<Gamma> dG(m);  // dG[l][k](i, j) = d_l G^k_ij
    for (int l = 0; l < m; ++l) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e(l) = h;
        Gamma a = gamma_at(x + e), b = gamma_at(x - e);
        dG[l].resize(m);
        for (int k = 0; k < m; ++k) dG[l][k] = (a[k] - b[k]) / (2 * h);
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k) {
                acc += dG[k][k](i, j) - dG[j][k](i, k);
                for (int l = 0; l < m; ++l) acc += G[k](k, l) * G[l](i, j) - G[k](j, l) * G[l](i, k);
            }
            R(i, j) = acc;
        }
    return R;
}

#define HK_INSTANTIATE_GEOMETRY(S)                                                                                 \
    template NumPoly at_identity_poly(const SeriesT<S>&);                                                           \
    template SliceFrame slice_frame(const HKFrameT<S>&);                                                            \
    template ManifoldChart integrate_manifold(const HKFrameT<S>&, const BridgeT<S>&, const ChartOptions&);

HK_INSTANTIATE_GEOMETRY(GaussQ)
HK_INSTANTIATE_GEOMETRY(cplx)

}  // namespace hk
