#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "hk/errors.hpp"
#include "hk/scalar.hpp"

namespace hk {

struct Dims {
    int n = 1;
    int p = 1;
    int q = 0;

    Dims() = default;
    Dims(int n_, int p_, int q_);
    int N() const { return (2 * n + 1) * n; }     // dim sp_n
    int dim_p() const { return 3 + N() + 4 * n; }  // dim of the full algebra
    int real_dim() const { return 4 * n; }
    friend bool operator==(const Dims& a, const Dims& b) { return a.n == b.n && a.p == b.p && a.q == b.q; }
};

// Dense matrix over either backend.
template <class S>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<S> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, Field<S>::zero()) {}
    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Field<S>::one();
        return m;
    }
    S& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    const S& operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    Mat operator*(const Mat& o) const {
        Mat r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                const S& x = (*this)(i, k);
                if (Field<S>::is_zero(x)) continue;
                for (int j = 0; j < o.cols; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }
    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
        return r;
    }
    Mat scaled(const S& s) const {
        Mat r = *this;
        for (auto& x : r.a) x *= s;
        return r;
    }
    Mat transpose() const {
        Mat r(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    bool is_zero() const {
        for (const auto& x : a)
            if (!Field<S>::is_zero(x)) return false;
        return true;
    }
    friend bool operator==(const Mat& x, const Mat& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
};

using QMat = Mat<GaussQ>;

Eigen::MatrixXcd to_eigen(const QMat& m);

enum class LabelKind { H0, Hpp, Hmm, E, EPlus, EMinus };

// Basis order: H0, Hpp, Hmm, E_1..E_N, e(+,1..2n), e(-,1..2n). Indices are 0-based.
struct BasisIndex {
    LabelKind kind = LabelKind::H0;
    int idx = 0;
};

int label_to_int(const Dims& d, BasisIndex b);
BasisIndex int_to_label(const Dims& d, int i);
std::string label_name(const Dims& d, int i);
int label_charge(const Dims& d, int i);

inline int ix_H0() { return 0; }
inline int ix_Hpp() { return 1; }
inline int ix_Hmm() { return 2; }
inline int ix_E(const Dims&, int A) { return 3 + A; }
inline int ix_ep(const Dims& d, int a) { return 3 + d.N() + a; }
inline int ix_em(const Dims& d, int a) { return 3 + d.N() + 2 * d.n + a; }

struct SymplecticData {
    QMat omega_lower;  // [[0, I],[-I, 0]]
    QMat omega_upper;  // inverse
    QMat eta;          // diag(+1 x p, -1 x q)
    QMat I2p2q;        // diag(eta, eta)
    QMat JJ;           // [[0, -eta],[eta, 0]]
    QMat Jhat0;        // value of Jhat at B = I
};

SymplecticData make_symplectic(const Dims& d);

struct EpsilonData {
    QMat eps_lower_ij, eps_upper_ij, eps_lower_AB, eps_upper_AB;
};

EpsilonData make_epsilon();

// e_a v e_b as a matrix on C^{2n}: (E_ab)^c_d = delta^c_a w_bd + delta^c_b w_ad.
QMat sp_basis_matrix(const Dims& d, int a, int b);

using PVec = std::vector<GaussQ>;
using SparseP = std::vector<std::pair<int, GaussQ>>;

class PAlgebra {
public:
    explicit PAlgebra(const Dims& d);

    const Dims& dims() const { return d_; }
    const SymplecticData& sym() const { return sym_; }
    int N() const { return d_.N(); }
    int dim() const { return d_.dim_p(); }

    const QMat& E(int A) const { return E_[A]; }
    const std::pair<int, int>& E_pair(int A) const { return pairs_[A]; }
    int E_index(int a, int b) const;

    // Coefficients of an sp_n matrix in the E basis; throws if m is not in sp_n.
    PVec sp_coordinates(const QMat& m) const;
    bool in_sp(const QMat& m) const;
    QMat sp_matrix(const PVec& coeffs) const;
    // E-coordinate A as a linear functional on flattened (row-major) matrix entries.
    SparseP sp_coordinate_weights(int A) const;

    const SparseP& bracket_basis(int i, int j) const { return table_[std::size_t(i) * dim() + j]; }
    PVec bracket(const PVec& X, const PVec& Y) const;
    PVec basis_vector(int i) const;

    // Exhaustive Jacobi check: returns the largest number of nonzero residual coefficients.
    bool jacobi_exact() const;
    bool grading_ok() const;

private:
    Dims d_;
    SymplecticData sym_;
    std::vector<QMat> E_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<SparseP> table_;
    // Left inverse of the flattening of the E basis, used by sp_coordinates.
    QMat flat_pinv_;
    std::vector<int> pivot_entries_;
};

// Numeric point (U, B, z) of the group; z holds central coordinates z^{ia} at index i*2n + a.
struct PPoint {
    Eigen::Matrix2cd U;
    Eigen::MatrixXcd B;
    Eigen::VectorXcd z;
};

Eigen::MatrixXcd eta_block(const Dims& d);       // I_{2p,2q}
Eigen::MatrixXcd JJ_numeric(const Dims& d);      // [[0,-eta],[eta,0]]
Eigen::VectorXcd psi_z(const Dims& d, const Eigen::VectorXcd& z);
PPoint tau_point(const Dims& d, const PPoint& x);
bool in_tau_fixed_slice(const Dims& d, const Eigen::VectorXcd& z, double tol);

// Jhat(B) = -I_{2p,2q} B^T I_{2p,2q} JJ B, so that tau_* e(+,a) = conj(Jhat)^b_a e(-,b).
Eigen::MatrixXcd Jhat(const Dims& d, const Eigen::MatrixXcd& B);

// Signed image of a basis label under tau_*; coefficients use Jhat at the given B.
std::vector<std::pair<int, cplx>> tau_label_pushforward(const Dims& d, int label, const Eigen::MatrixXcd& B);

}  // namespace hk

namespace hk {

// Exact or pivoted inverse; throws SingularFrame-free BadDimensions on singular input.
template <class S>
Mat<S> mat_inverse(const Mat<S>& m);

}  // namespace hk
