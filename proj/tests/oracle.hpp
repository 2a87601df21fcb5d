#pragma once
// Test-only helpers that recompute quantities by routes independent of the library code.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "hk/jets.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline Eigen::Matrix2cd random_sl2(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::Matrix2cd U;
    U << cplx(1.0 + g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(1.0 + g(rng), g(rng));
    U /= std::sqrt(U.determinant());
    return U;
}

// Raw monomial value, no reduction involved.
inline cplx raw_monomial(const Eigen::Matrix2cd& U, int a, int b, int c, int d) {
    return std::pow(U(0, 0), a) * std::pow(U(1, 0), b) * std::pow(U(0, 1), c) * std::pow(U(1, 1), d);
}

// Differentiate a function of U along the one-parameter subgroup generated on the right by X.
template <class F>
cplx right_derivative(F f, const Eigen::Matrix2cd& U, const Eigen::Matrix2cd& X, double h = 1e-5) {
    Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    return (f(U * (I + h * X + 0.5 * h * h * X * X)) - f(U * (I - h * X + 0.5 * h * h * X * X))) / (2.0 * h);
}

// Random series of fixed charge in analytic coordinates.
inline hk::Series random_series(std::mt19937_64& rng, int n, int order, int charge, int nterms) {
    using namespace hk;
    std::uniform_int_distribution<int> slot(0, 4 * n - 1), deg(0, order), ue(0, 3), cf(-4, 4);
    Series s(n, order, Coords::Analytic, charge);
    for (int t = 0; t < nterms; ++t) {
        ZKey k = 0;
        int dz = deg(rng);
        for (int i = 0; i < dz; ++i) k += zunit(slot(rng));
        int zc = 0;
        for (int a = 0; a < 2 * n; ++a) zc += zexp(k, 2 * n + a) - zexp(k, a);
        int uc = charge - zc;
        int a = ue(rng), b = ue(rng), c = ue(rng);
        int d = a + b - c - uc;
        if (d < 0) continue;
        s.add_term(k, HarmonicPoly::reduce({{ukey(a, b, c, d), GaussQ(cf(rng))}}));
    }
    return s;
}

// I_4 (x) eta with eta = diag(+1 x p, -1 x q).
inline Eigen::MatrixXd flat_metric(int n, int p) {
    Eigen::VectorXd eta(n);
    for (int a = 0; a < n; ++a) eta(a) = a < p ? 1.0 : -1.0;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    for (int b = 0; b < 4; ++b) g.block(b * n, b * n, n, n) = eta.asDiagonal();
    return g;
}

// Ricci tensor from first and second central differences of g, using
// R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik with d G expanded through d(g^-1).
inline Eigen::MatrixXd ricci(const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& x,
                             double h) {
    const int m = int(x.size());
    auto e = [&](int i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        v(i) = h;
        return v;
    };
    Eigen::MatrixXd g0 = g(x), gi = g0.inverse();
    std::vector<Eigen::MatrixXd> d1(m);
    std::vector<std::vector<Eigen::MatrixXd>> d2(m, std::vector<Eigen::MatrixXd>(m));
    for (int i = 0; i < m; ++i) {
        Eigen::MatrixXd p = g(x + e(i)), q = g(x - e(i));
        d1[i] = (p - q) / (2 * h);
        d2[i][i] = (p - 2 * g0 + q) / (h * h);
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            d2[i][j] = (g(x + e(i) + e(j)) - g(x + e(i) - e(j)) - g(x - e(i) + e(j)) + g(x - e(i) - e(j))) / (4 * h * h);
            d2[j][i] = d2[i][j];
        }
    // lowered Christoffel symbols and their derivatives: C[l](i,j) = G_lij, dC[k][l](i,j) = d_k G_lij
    auto low = [&](const std::vector<Eigen::MatrixXd>& d, int l, int i, int j) {
        return 0.5 * (d[i](l, j) + d[j](l, i) - d[l](i, j));
    };
    std::vector<Eigen::MatrixXd> C(m, Eigen::MatrixXd(m, m));
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) C[l](i, j) = low(d1, l, i, j);
    auto dlow = [&](int k, int l, int i, int j) {
        return 0.5 * (d2[k][i](l, j) + d2[k][j](l, i) - d2[k][l](i, j));
    };
    std::vector<Eigen::MatrixXd> dgi(m);
    for (int k = 0; k < m; ++k) dgi[k] = -gi * d1[k] * gi;
    auto Gam = [&](int k, int i, int j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += gi(k, l) * C[l](i, j);
        return s;
    };
    auto dGam = [&](int a, int k, int i, int j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += dgi[a](k, l) * C[l](i, j) + gi(k, l) * dlow(a, l, i, j);
        return s;
    };
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) {
                s += dGam(k, k, i, j) - dGam(j, k, i, k);
                for (int l = 0; l < m; ++l) s += Gam(k, k, l) * Gam(l, i, j) - Gam(k, j, l) * Gam(l, i, k);
            }
            R(i, j) = s;
        }
    return R;
}

}  // namespace oracle
