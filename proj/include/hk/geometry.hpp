#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "hk/frames.hpp"
#include "hk/pipeline.hpp"

namespace hk {

// Complex polynomial in the 4n z-variables (slot layout of the series it came from).
struct NumPoly {
    int nvars = 0;
    std::vector<std::pair<std::vector<int>, cplx>> terms;

    cplx eval(const Eigen::VectorXcd& z) const;
    NumPoly derivative(int slot) const;
    int degree() const;
};

// Restriction of a series to U = I2.
template <class S>
NumPoly at_identity_poly(const SeriesT<S>& s);

// All frame coefficients on the slice U = I2, B = I.
struct SliceFrame {
    Dims d;
    int dim = 0;
    std::vector<std::vector<NumPoly>> c;  // [field][flat label]
    std::vector<std::vector<NumPoly>> dem;  // d/dz^slot of the z-part of e(-,a): [a][4n * slot + component]

    Eigen::MatrixXcd matrix(const Eigen::VectorXcd& z) const;  // rows = fields
    // Column a is the z-part of e(-,a), in central slot layout.
    Eigen::MatrixXcd em_z(const Eigen::VectorXcd& z) const;
    // d em_z(:, a) / dz, one 4n x 4n block per a.
    std::vector<Eigen::MatrixXcd> em_z_jacobian(const Eigen::VectorXcd& z) const;
};

template <class S>
SliceFrame slice_frame(const HKFrameT<S>& F);

// Which index of Jhat contracts with the frame label in the distribution generators.
enum class Pairing { Standard, Swapped };

// K_a^d in  e(+,a) + K_a^d e(-,d); the standard pairing makes these tau-real at U = I2.
Eigen::MatrixXd pairing_matrix(const Dims& d, Pairing pr);

// Real tau-invariant basis of C^{4n} in the order (+1..+2n, -1..-2n); column I as a vector of
// coefficients on (e(+,1..2n), e(-,1..2n)).
Eigen::MatrixXcd tau_basis(const Dims& d, Pairing pr = Pairing::Standard);
// (I_4 x eta) in the same order.
Eigen::MatrixXd flat_metric(const Dims& d);

struct ChartOptions {
    double radius = 0.1;
    int steps = 16;          // RK4 steps per generator
    int max_samples = 6;     // U samples in SU(2), I2 first
    int points = 20;         // stored chart points, origin first
    std::uint64_t seed = 1;
    double rank_tol = 1e-8;
    double escape = 1e3;     // |z| beyond this counts as divergence
    Pairing pairing = Pairing::Standard;
    bool parallel = true;
};

struct ChartPoint {
    Eigen::VectorXd x;   // chart coordinates
    Eigen::VectorXcd z;  // point of M'
    Eigen::VectorXcd w;  // phi(I2, z), point of M
    Eigen::MatrixXcd T;  // dw/dx, 4n x 4n
    double slice_defect = 0.0;  // |Phi(I2, z) - 1|
};

struct ManifoldChart {
    Dims d;
    ChartOptions opt;
    SliceFrame frame;
    std::vector<NumPoly> phi;               // phi^{ia} at U = I2
    std::vector<NumPoly> dphi;              // [s * 4n + t] = d phi_s / dz_t
    std::vector<std::vector<NumPoly>> Phi;  // phi^a_b at U = I2
    std::vector<Eigen::Matrix2cd> samples;
    std::vector<Eigen::MatrixXcd> Ebasis;   // E_A as 2n x 2n matrices
    Eigen::MatrixXcd A;   // generator k = A(:, k) + em_z(z) * Bm(:, k)
    Eigen::MatrixXcd Bm;
    int rank_at_origin = 0;
    double closure_defect = 0.0;
    cplx twist = 1.0;     // test hook: rotates every chart point off the real slice
    std::vector<ChartPoint> points;

    Eigen::MatrixXcd generators(const Eigen::VectorXcd& z) const;  // 4n x 4n
    ChartPoint point(const Eigen::VectorXd& x) const;
};

// Chart of the integral manifold of the tau-real distribution through 0, second-kind coordinates.
template <class S>
ManifoldChart integrate_manifold(const HKFrameT<S>& F, const BridgeT<S>& B, const ChartOptions& opt = {});

// Pseudo-random points of the ball of the given radius; the origin comes first.
std::vector<Eigen::VectorXd> chart_sample(int dim, int count, double radius, std::uint64_t seed);

ManifoldChart twisted(const ManifoldChart& C, double angle);

struct MetricOptions {
    double tol = 1e-8;
    std::uint64_t section_seed = 7;
    double section_scale = 0.3;
};

struct MetricSample {
    Eigen::VectorXd x;
    Eigen::MatrixXd g;             // real part of the coframe-route metric
    double imag_max = 0.0;
    double asym_max = 0.0;
    double route_diff = 0.0;       // coframe vs vielbein
    double section_diff = 0.0;     // vielbein with sigma vs sigma' = sigma exp(X)
    double tangency = 0.0;         // vielbeins off T M
    double vertical_defect = 0.0;  // E-parts of tau-real frame vectors outside sp(p,q)
    std::pair<int, int> signature{0, 0};
};

// Throws OutOfChart, SingularFrame, RouteMismatch.
MetricSample metric_at(const ManifoldChart& C, const Eigen::VectorXd& x, const MetricOptions& opt = {});
// No route check; used where a failing point must still be reported.
MetricSample evaluate_metric(const ManifoldChart& C, const Eigen::VectorXd& x, const MetricOptions& opt = {});

std::vector<MetricSample> metric_samples(const ManifoldChart& C, const std::vector<Eigen::VectorXd>& xs,
                                         const MetricOptions& opt = {}, bool parallel = true);

struct RealityPoint {
    Eigen::VectorXd x;
    int transversal_rank = 0;
    double imag_max = 0.0;
    std::pair<int, int> signature{0, 0};
    bool ok = false;
};

struct RealityReport {
    std::vector<RealityPoint> points;
    bool ok() const;
};

RealityReport reality_report(const ManifoldChart& C, const std::vector<Eigen::VectorXd>& xs, double tol = 1e-8);

// Ricci tensor of the chart metric by central differences of step h.
Eigen::MatrixXd ricci_fd(const ManifoldChart& C, const Eigen::VectorXd& x, double h = 1e-3);

}  // namespace hk
