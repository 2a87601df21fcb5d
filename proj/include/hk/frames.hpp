#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hk/algebra.hpp"
#include "hk/jets.hpp"

namespace hk {

// How the B-dependence of a field's coefficients is reconstituted. A field transforms like the
// flat field `label` under [E_A, .]; members of a family read their siblings' coefficients.
template <class S>
struct FrameEquivariance {
    int label = 0;
    std::shared_ptr<const std::map<int, std::map<int, SeriesT<S>>>> family;  // label -> coefficients
};

template <class S>
class FrameFieldT {
public:
    using Ser = SeriesT<S>;
    using Coeffs = std::map<int, Ser>;

    FrameFieldT() = default;
    FrameFieldT(const Dims& d, int order, int charge);

    static FrameFieldT flat(const Dims& d, int order, int label);

    const Dims& dims() const { return d_; }
    int order() const { return order_; }
    int charge() const { return charge_; }
    const Coeffs& coeffs() const { return c_; }
    Ser coeff(int label) const;
    const std::optional<FrameEquivariance<S>>& equivariance() const { return eq_; }

    void set(int label, const Ser& s);
    void add(int label, const Ser& s);
    FrameFieldT& operator+=(const FrameFieldT& o);
    FrameFieldT& operator-=(const FrameFieldT& o);
    FrameFieldT operator+(const FrameFieldT& o) const { FrameFieldT r = *this; return r += o; }
    FrameFieldT operator-(const FrameFieldT& o) const { FrameFieldT r = *this; return r -= o; }
    FrameFieldT scaled(const S& s) const;
    // Multiplication by a z-independent function of U.
    FrameFieldT times(const HarmonicPolyT<S>& h) const;

    // Invariant under E; valid for any field built only from H-type flat fields and scalar data.
    FrameFieldT& mark_invariant();
    FrameFieldT& set_equivariance(FrameEquivariance<S> e);
    FrameFieldT& clear_equivariance();

    int valid() const;
    double max_abs_upto(int deg) const;
    bool is_zero_upto(int deg) const;

    // E0_A applied to the coefficient of `label`, using the equivariance rule.
    Ser E_action(const PAlgebra& P, int A, int label) const;
    // X(f) for a series f carrying scalar equivariance.
    Ser apply(const PAlgebra& P, const Ser& f) const;

    // Dense coefficient matrix row at a point on the harmonic slice.
    Eigen::VectorXcd eval(const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z) const;

    template <class T>
    FrameFieldT<T> convert() const {
        FrameFieldT<T> r(d_, order_, charge_);
        for (const auto& [l, s] : c_) r.set(l, s.template convert<T>());
        if (eq_ && !eq_->family) r.mark_invariant();
        return r;
    }
    FrameFieldT chopped(double tol) const;

    std::string str() const;

private:
    Dims d_;
    int order_ = 0;
    int charge_ = 0;
    Coeffs c_;
    std::optional<FrameEquivariance<S>> eq_;
};

template <class S>
FrameFieldT<S> lie_bracket(const PAlgebra& P, const FrameFieldT<S>& X, const FrameFieldT<S>& Y);

enum class FrameKind { Flat, Central, Canonical, General };

template <class S>
struct HKFrameT {
    Dims d;
    int order = 0;
    FrameKind kind = FrameKind::General;
    FrameFieldT<S> H0, Hpp, Hmm;
    std::vector<FrameFieldT<S>> E, ep, em;

    // Wires the family equivariance of E, e+ and e- and marks the H fields invariant.
    void attach_equivariance();
    // Field for a flat basis label (H0, Hpp, Hmm, E(A), e(+,a), e(-,a)).
    const FrameFieldT<S>& field(int label) const;
    int valid() const;

    template <class T>
    HKFrameT<T> convert() const {
        HKFrameT<T> r;
        r.d = d;
        r.order = order;
        r.kind = kind;
        r.H0 = H0.template convert<T>();
        r.Hpp = Hpp.template convert<T>();
        r.Hmm = Hmm.template convert<T>();
        for (const auto& f : E) r.E.push_back(f.template convert<T>());
        for (const auto& f : ep) r.ep.push_back(f.template convert<T>());
        for (const auto& f : em) r.em.push_back(f.template convert<T>());
        r.attach_equivariance();
        return r;
    }
};

template <class S>
HKFrameT<S> flat_frame(const Dims& d, int order);

struct ResidualEntry {
    std::string family;
    double max_residual = 0.0;
    int valid_order = 0;
    bool exact_zero = true;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    bool ok(double tol = 0.0) const;
};

template <class S>
ResidualReport check_hk_axioms(const PAlgebra& P, const HKFrameT<S>& F);

template <class S>
struct CurvatureDataT {
    int n = 1;
    // R[a][b][A] = coefficient of E_A in [e+a, e-b]
    std::vector<std::vector<std::vector<SeriesT<S>>>> R;
    int valid = kExactOrder;
};

template <class S>
CurvatureDataT<S> extract_curvature(const PAlgebra& P, const HKFrameT<S>& F);

// Checks that omega_{ce} (R_ab)^e_d is totally symmetric in (c, d, a, b); returns the max residual.
template <class S>
double curvature_symmetry_residual(const PAlgebra& P, const CurvatureDataT<S>& C);

template <class S>
struct CanonicalReportT {
    bool H0_flat = false, E_flat = false, ep_flat = false;
    bool Hpp_shape = false, Hmm_shape = false, em_shape = false;
    bool vpp_vanishes_on_slice = false;  // v^{+b}_{++} at z+ = 0
    bool vm_minus_zero = false;          // v^{-c}_{-b}
    std::vector<SeriesT<S>> v_potential; // v^{-a}_{++}
    bool canonical() const {
        return H0_flat && E_flat && ep_flat && Hpp_shape && Hmm_shape && em_shape && vpp_vanishes_on_slice &&
               vm_minus_zero;
    }
};

template <class S>
CanonicalReportT<S> check_canonical(const PAlgebra& P, const HKFrameT<S>& F);

template <class S>
ResidualReport check_potentials_identities(const PAlgebra& P, const HKFrameT<S>& F);

// A_{++}(E)^a_b as a matrix of series.
template <class S>
std::vector<std::vector<SeriesT<S>>> E_matrix(const PAlgebra& P, const FrameFieldT<S>& X);

// Smallest singular value ratio test of the full frame at sample points; returns the minimum rank seen.
template <class S>
int frame_rank(const HKFrameT<S>& F, const std::vector<std::pair<Eigen::Matrix2cd, Eigen::VectorXcd>>& pts,
               double tol = 1e-9);

using FrameField = FrameFieldT<GaussQ>;
using FrameFieldF = FrameFieldT<cplx>;
using HKFrame = HKFrameT<GaussQ>;
using HKFrameF = HKFrameT<cplx>;
using CurvatureData = CurvatureDataT<GaussQ>;
using CanonicalReport = CanonicalReportT<GaussQ>;

}  // namespace hk
