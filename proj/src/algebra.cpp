#include "hk/algebra.hpp"

#include <sstream>

namespace hk {

std::string scalar_str(const GaussQ& s) {
    if (sgn(s.im) == 0) return s.re.get_str();
    std::ostringstream os;
    os << "(" << s.re.get_str() << (sgn(s.im) < 0 ? "-" : "+") << mpq_class(abs(s.im)).get_str() << "i)";
    return os.str();
}

std::string scalar_str(const cplx& s) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i)";
    return os.str();
}

std::string GaussQ::str() const { return scalar_str(*this); }

Dims::Dims(int n_, int p_, int q_) : n(n_), p(p_), q(q_) {
    if (n < 1 || p < 0 || q < 0 || p + q != n)
        throw Error(ErrorKind::BadDimensions, "need n >= 1 and p + q = n");
    if (n > 4) throw Error(ErrorKind::BadDimensions, "n > 4 exceeds the packed z-exponent layout");
}

Eigen::MatrixXcd to_eigen(const QMat& m) {
    Eigen::MatrixXcd r(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(i, j) = m(i, j).to_complex();
    return r;
}

template <class S>
Mat<S> mat_inverse(const Mat<S>& m) {
    if (m.rows != m.cols) throw Error(ErrorKind::ShapeMismatch, "inverse of a non-square matrix");
    const int n = m.rows;
    Mat<S> a = m;
    Mat<S> inv = Mat<S>::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        double best = 0.0;
        for (int r = c; r < n; ++r) {
            double mag = Field<S>::magnitude(a(r, c));
            if (!Field<S>::is_zero(a(r, c)) && mag > best) {
                best = mag;
                piv = r;
                if (Field<S>::exact) break;
            }
        }
        if (piv < 0 || Field<S>::negligible(a(piv, c), 1e-14))
            throw Error(ErrorKind::SingularJacobian, "matrix is singular");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        S p = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= p;
            inv(c, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || Field<S>::is_zero(a(r, c))) continue;
            S f = a(r, c);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

template Mat<GaussQ> mat_inverse(const Mat<GaussQ>&);
template Mat<cplx> mat_inverse(const Mat<cplx>&);

int label_to_int(const Dims& d, BasisIndex b) {
    switch (b.kind) {
        case LabelKind::H0: return 0;
        case LabelKind::Hpp: return 1;
        case LabelKind::Hmm: return 2;
        case LabelKind::E:
            if (b.idx < 0 || b.idx >= d.N()) throw Error(ErrorKind::BadIndex, "E index out of range");
            return 3 + b.idx;
        case LabelKind::EPlus:
            if (b.idx < 0 || b.idx >= 2 * d.n) throw Error(ErrorKind::BadIndex, "e+ index out of range");
            return ix_ep(d, b.idx);
        case LabelKind::EMinus:
            if (b.idx < 0 || b.idx >= 2 * d.n) throw Error(ErrorKind::BadIndex, "e- index out of range");
            return ix_em(d, b.idx);
    }
    return -1;
}

BasisIndex int_to_label(const Dims& d, int i) {
    if (i < 0 || i >= d.dim_p()) throw Error(ErrorKind::BadIndex, "basis index out of range");
    if (i == 0) return {LabelKind::H0, 0};
    if (i == 1) return {LabelKind::Hpp, 0};
    if (i == 2) return {LabelKind::Hmm, 0};
    if (i < 3 + d.N()) return {LabelKind::E, i - 3};
    if (i < 3 + d.N() + 2 * d.n) return {LabelKind::EPlus, i - 3 - d.N()};
    return {LabelKind::EMinus, i - 3 - d.N() - 2 * d.n};
}

std::string label_name(const Dims& d, int i) {
    BasisIndex b = int_to_label(d, i);
    switch (b.kind) {
        case LabelKind::H0: return "H0";
        case LabelKind::Hpp: return "H++";
        case LabelKind::Hmm: return "H--";
        case LabelKind::E: return "E" + std::to_string(b.idx + 1);
        case LabelKind::EPlus: return "e+" + std::to_string(b.idx + 1);
        case LabelKind::EMinus: return "e-" + std::to_string(b.idx + 1);
    }
    return "?";
}

int label_charge(const Dims& d, int i) {
    switch (int_to_label(d, i).kind) {
        case LabelKind::Hpp: return 2;
        case LabelKind::Hmm: return -2;
        case LabelKind::EPlus: return 1;
        case LabelKind::EMinus: return -1;
        default: return 0;
    }
}

SymplecticData make_symplectic(const Dims& d) {
    const int n = d.n, m = 2 * n;
    SymplecticData s;
    s.omega_lower = QMat(m, m);
    s.eta = QMat(n, n);
    s.I2p2q = QMat(m, m);
    s.JJ = QMat(m, m);
    for (int i = 0; i < n; ++i) {
        s.omega_lower(i, n + i) = GaussQ(1);
        s.omega_lower(n + i, i) = GaussQ(-1);
        GaussQ e(i < d.p ? 1 : -1);
        s.eta(i, i) = e;
        s.I2p2q(i, i) = e;
        s.I2p2q(n + i, n + i) = e;
        s.JJ(i, n + i) = -e;
        s.JJ(n + i, i) = e;
    }
    s.omega_upper = mat_inverse(s.omega_lower);
    s.Jhat0 = s.JJ.scaled(GaussQ(-1));
    return s;
}

EpsilonData make_epsilon() {
    EpsilonData e;
    QMat lo(2, 2);
    lo(0, 1) = GaussQ(1);
    lo(1, 0) = GaussQ(-1);
    QMat up = lo.scaled(GaussQ(-1));
    e.eps_lower_ij = lo;
    e.eps_upper_ij = up;
    e.eps_lower_AB = lo;
    e.eps_upper_AB = up;
    return e;
}

QMat sp_basis_matrix(const Dims& d, int a, int b) {
    const int m = 2 * d.n;
    if (a < 0 || b < 0 || a >= m || b >= m) throw Error(ErrorKind::BadIndex, "sp basis index out of range");
    QMat w = make_symplectic(d).omega_lower;
    QMat r(m, m);
    for (int j = 0; j < m; ++j) {
        r(a, j) += w(b, j);
        r(b, j) += w(a, j);
    }
    return r;
}

PAlgebra::PAlgebra(const Dims& d) : d_(d), sym_(make_symplectic(d)) {
    const int m = 2 * d.n;
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            pairs_.emplace_back(a, b);
            E_.push_back(sp_basis_matrix(d, a, b));
        }
    const int N = d.N();

    // Choose N matrix entries on which the E basis is invertible.
    QMat flat(m * m, N);
    for (int A = 0; A < N; ++A)
        for (int k = 0; k < m * m; ++k) flat(k, A) = E_[A].a[k];
    {
        QMat work = flat;
        std::vector<int> rows;
        std::vector<bool> used(m * m, false);
        for (int c = 0; c < N; ++c) {
            int piv = -1;
            for (int r = 0; r < m * m; ++r)
                if (!used[r] && !work(r, c).is_zero()) { piv = r; break; }
            if (piv < 0) throw Error(ErrorKind::BadDimensions, "sp basis is degenerate");
            used[piv] = true;
            rows.push_back(piv);
            for (int r = 0; r < m * m; ++r) {
                if (r == piv || work(r, c).is_zero()) continue;
                GaussQ f = work(r, c) / work(piv, c);
                for (int j = 0; j < N; ++j) work(r, j) -= f * work(piv, j);
            }
        }
        pivot_entries_ = rows;
        QMat sq(N, N);
        for (int i = 0; i < N; ++i)
            for (int A = 0; A < N; ++A) sq(i, A) = flat(rows[i], A);
        flat_pinv_ = mat_inverse(sq);
    }

    const int D = dim();
    table_.assign(std::size_t(D) * D, {});
    auto set = [&](int i, int j, SparseP v) {
        SparseP neg;
        for (auto& [k, c] : v) neg.emplace_back(k, -c);
        table_[std::size_t(i) * D + j] = std::move(v);
        table_[std::size_t(j) * D + i] = std::move(neg);
    };
    for (int i = 1; i < D; ++i) {
        int c = label_charge(d, i);
        if (c != 0) set(0, i, {{i, GaussQ(c)}});
    }
    set(ix_Hpp(), ix_Hmm(), {{ix_H0(), GaussQ(1)}});
    for (int a = 0; a < m; ++a) {
        set(ix_Hpp(), ix_em(d, a), {{ix_ep(d, a), GaussQ(1)}});
        set(ix_Hmm(), ix_ep(d, a), {{ix_em(d, a), GaussQ(1)}});
    }
    for (int A = 0; A < N; ++A) {
        for (int B = A + 1; B < N; ++B) {
            QMat c = E_[A] * E_[B] - E_[B] * E_[A];
            PVec co = sp_coordinates(c);
            SparseP v;
            for (int C = 0; C < N; ++C)
                if (!co[C].is_zero()) v.emplace_back(ix_E(d, C), co[C]);
            set(ix_E(d, A), ix_E(d, B), std::move(v));
        }
        for (int a = 0; a < m; ++a) {
            SparseP vp, vm;
            for (int b = 0; b < m; ++b) {
                const GaussQ& x = E_[A](b, a);
                if (x.is_zero()) continue;
                vp.emplace_back(ix_ep(d, b), x);
                vm.emplace_back(ix_em(d, b), x);
            }
            set(ix_E(d, A), ix_ep(d, a), std::move(vp));
            set(ix_E(d, A), ix_em(d, a), std::move(vm));
        }
    }
}

int PAlgebra::E_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (int A = 0; A < N(); ++A)
        if (pairs_[A].first == a && pairs_[A].second == b) return A;
    throw Error(ErrorKind::BadIndex, "no such sp basis pair");
}

PVec PAlgebra::sp_coordinates(const QMat& m) const {
    const int Nn = N();
    PVec c(Nn);
    for (int A = 0; A < Nn; ++A)
        for (int i = 0; i < Nn; ++i) {
            const GaussQ& x = m.a[pivot_entries_[i]];
            if (!x.is_zero()) c[A] += flat_pinv_(A, i) * x;
        }
    if (!(sp_matrix(c) == m)) throw Error(ErrorKind::Inconsistent, "matrix is not in sp_n");
    return c;
}

SparseP PAlgebra::sp_coordinate_weights(int A) const {
    SparseP w;
    for (int i = 0; i < N(); ++i)
        if (!flat_pinv_(A, i).is_zero()) w.emplace_back(pivot_entries_[i], flat_pinv_(A, i));
    return w;
}

bool PAlgebra::in_sp(const QMat& m) const {
    QMat w = sym_.omega_lower;
    return (m.transpose() * w + w * m).is_zero();
}

QMat PAlgebra::sp_matrix(const PVec& coeffs) const {
    const int m = 2 * d_.n;
    QMat r(m, m);
    for (int A = 0; A < N(); ++A) {
        if (coeffs[A].is_zero()) continue;
        for (std::size_t k = 0; k < r.a.size(); ++k)
            if (!E_[A].a[k].is_zero()) r.a[k] += coeffs[A] * E_[A].a[k];
    }
    return r;
}

PVec PAlgebra::basis_vector(int i) const {
    PVec v(dim());
    v[i] = GaussQ(1);
    return v;
}

PVec PAlgebra::bracket(const PVec& X, const PVec& Y) const {
    const int D = dim();
    PVec r(D);
    for (int i = 0; i < D; ++i) {
        if (X[i].is_zero()) continue;
        for (int j = 0; j < D; ++j) {
            if (Y[j].is_zero()) continue;
            GaussQ xy = X[i] * Y[j];
            for (const auto& [k, c] : bracket_basis(i, j)) r[k] += xy * c;
        }
    }
    return r;
}

bool PAlgebra::jacobi_exact() const {
    const int D = dim();
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j)
            for (int k = j + 1; k < D; ++k) {
                PVec a = basis_vector(i), b = basis_vector(j), c = basis_vector(k);
                PVec s = bracket(a, bracket(b, c));
                PVec t = bracket(b, bracket(c, a));
                PVec u = bracket(c, bracket(a, b));
                for (int l = 0; l < D; ++l)
                    if (!(s[l] + t[l] + u[l]).is_zero()) return false;
            }
    return true;
}

bool PAlgebra::grading_ok() const {
    const int D = dim();
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            int c = label_charge(d_, i) + label_charge(d_, j);
            const auto& v = bracket_basis(i, j);
            if (std::abs(c) > 2 && !v.empty()) return false;
            for (const auto& kv : v)
                if (label_charge(d_, kv.first) != c) return false;
        }
    return true;
}

Eigen::MatrixXcd eta_block(const Dims& d) { return to_eigen(make_symplectic(d).I2p2q); }
Eigen::MatrixXcd JJ_numeric(const Dims& d) { return to_eigen(make_symplectic(d).JJ); }

Eigen::VectorXcd psi_z(const Dims& d, const Eigen::VectorXcd& z) {
    // psi^{jb} = -J^j_i JJ^b_a z^{ia}, J = [[0,-1],[1,0]]
    const int m = 2 * d.n;
    Eigen::MatrixXcd JJ = JJ_numeric(d);
    Eigen::Matrix2cd J;
    J << 0.0, -1.0, 1.0, 0.0;
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(2 * m);
    for (int j = 0; j < 2; ++j)
        for (int b = 0; b < m; ++b) {
            cplx acc = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int a = 0; a < m; ++a) acc -= J(j, i) * JJ(b, a) * z(i * m + a);
            r(j * m + b) = acc;
        }
    return r;
}

PPoint tau_point(const Dims& d, const PPoint& x) {
    if (std::abs(x.U.determinant()) < 1e-300) throw Error(ErrorKind::SingularJacobian, "singular U");
    Eigen::MatrixXcd I = eta_block(d);
    Eigen::MatrixXcd M = I * x.B.conjugate().transpose() * I;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularJacobian, "singular B");
    PPoint r;
    r.U = x.U.conjugate().transpose().inverse();
    r.B = lu.inverse();
    r.z = psi_z(d, x.z).conjugate();
    return r;
}

bool in_tau_fixed_slice(const Dims& d, const Eigen::VectorXcd& z, double tol) {
    return (psi_z(d, z).conjugate() - z).norm() <= tol;
}

Eigen::MatrixXcd Jhat(const Dims& d, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd I = eta_block(d);
    return -I * B.transpose() * I * JJ_numeric(d) * B;
}

std::vector<std::pair<int, cplx>> tau_label_pushforward(const Dims& d, int label, const Eigen::MatrixXcd& B) {
    BasisIndex b = int_to_label(d, label);
    const int m = 2 * d.n;
    std::vector<std::pair<int, cplx>> r;
    switch (b.kind) {
        case LabelKind::H0: r.emplace_back(ix_H0(), -1.0); break;
        case LabelKind::Hpp: r.emplace_back(ix_Hmm(), -1.0); break;
        case LabelKind::Hmm: r.emplace_back(ix_Hpp(), -1.0); break;
        case LabelKind::E: throw Error(ErrorKind::BadIndex, "tau pushforward is only tabulated for H and e labels");
        case LabelKind::EPlus:
        case LabelKind::EMinus: {
            Eigen::MatrixXcd J = Jhat(d, B).conjugate();
            double s = b.kind == LabelKind::EPlus ? 1.0 : -1.0;
            for (int c = 0; c < m; ++c) {
                cplx v = s * J(c, b.idx);
                if (v == cplx(0.0)) continue;
                r.emplace_back(b.kind == LabelKind::EPlus ? ix_em(d, c) : ix_ep(d, c), v);
            }
        } break;
    }
    return r;
}

}  // namespace hk
