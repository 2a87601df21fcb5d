#include "hk/frames.hpp"

#include <sstream>
#include <type_traits>

namespace hk {

namespace {

bool h_type(const Dims& d, int label) {
    LabelKind k = int_to_label(d, label).kind;
    return k == LabelKind::H0 || k == LabelKind::Hpp || k == LabelKind::Hmm;
}

}  // namespace

template <class S>
FrameFieldT<S>::FrameFieldT(const Dims& d, int order, int charge) : d_(d), order_(order), charge_(charge) {}

template <class S>
FrameFieldT<S> FrameFieldT<S>::flat(const Dims& d, int order, int label) {
    FrameFieldT r(d, order, label_charge(d, label));
    r.set(label, Ser::constant(d.n, order, HarmonicPolyT<S>::constant(Field<S>::one())));
    if (h_type(d, label)) r.mark_invariant();
    else r.set_equivariance({label, nullptr});
    return r;
}

template <class S>
typename FrameFieldT<S>::Ser FrameFieldT<S>::coeff(int label) const {
    auto it = c_.find(label);
    if (it != c_.end()) return it->second;
    return Ser::zero(d_.n, order_, charge_ - label_charge(d_, label));
}

template <class S>
void FrameFieldT<S>::set(int label, const Ser& s) {
    if (label < 0 || label >= d_.dim_p()) throw Error(ErrorKind::BadIndex, "frame label out of range");
    if (s.n() != d_.n || s.order() != order_) throw Error(ErrorKind::ShapeMismatch, "coefficient shape differs");
    const int want = charge_ - label_charge(d_, label);
    if (!s.is_zero()) {
        auto q = s.charge() ? s.charge() : s.computed_charge();
        if (!q || *q != want)
            throw Error(ErrorKind::ChargeMismatch, "coefficient of " + label_name(d_, label) + " must have charge " +
                                                       std::to_string(want));
    }
    if (s.is_zero() && s.exact()) {
        c_.erase(label);
        return;
    }
    c_[label] = s.with_charge(want);
}

template <class S>
void FrameFieldT<S>::add(int label, const Ser& s) {
    if (s.is_zero() && s.exact()) return;
    auto it = c_.find(label);
    if (it == c_.end()) {
        set(label, s);
        return;
    }
    Ser sum = it->second;
    sum += s.is_zero() ? Ser::zero(d_.n, order_, sum.charge()).with_valid(s.valid()) : s;
    set(label, sum);
}

template <class S>
FrameFieldT<S>& FrameFieldT<S>::operator+=(const FrameFieldT& o) {
    if (o.charge_ != charge_) throw Error(ErrorKind::ChargeMismatch, "adding frame fields of different charge");
    for (const auto& [l, s] : o.c_) add(l, s);
    eq_.reset();
    return *this;
}

template <class S>
FrameFieldT<S>& FrameFieldT<S>::operator-=(const FrameFieldT& o) {
    return *this += o.scaled(-Field<S>::one());
}

template <class S>
FrameFieldT<S> FrameFieldT<S>::scaled(const S& s) const {
    FrameFieldT r(d_, order_, charge_);
    for (const auto& [l, c] : c_) r.set(l, c.scaled(s));
    r.eq_ = eq_;
    return r;
}

template <class S>
FrameFieldT<S> FrameFieldT<S>::times(const HarmonicPolyT<S>& h) const {
    auto hq = h.charge();
    if (!hq) throw Error(ErrorKind::ChargeMismatch, "multiplier must be charge homogeneous");
    FrameFieldT r(d_, order_, charge_ + *hq);
    for (const auto& [l, c] : c_) r.set(l, c.times(h));
    return r;
}

template <class S>
FrameFieldT<S>& FrameFieldT<S>::mark_invariant() {
    eq_ = FrameEquivariance<S>{label_to_int(d_, {LabelKind::H0, 0}), nullptr};
    return *this;
}

template <class S>
FrameFieldT<S>& FrameFieldT<S>::set_equivariance(FrameEquivariance<S> e) {
    eq_ = std::move(e);
    return *this;
}

template <class S>
FrameFieldT<S>& FrameFieldT<S>::clear_equivariance() {
    eq_.reset();
    return *this;
}

template <class S>
int FrameFieldT<S>::valid() const {
    int v = kExactOrder;
    for (const auto& [l, c] : c_) v = std::min(v, c.valid());
    return v;
}

template <class S>
double FrameFieldT<S>::max_abs_upto(int deg) const {
    double m = 0.0;
    for (const auto& [l, c] : c_) m = std::max(m, c.max_abs_upto(deg));
    return m;
}

template <class S>
bool FrameFieldT<S>::is_zero_upto(int deg) const {
    for (const auto& [l, c] : c_)
        if (!c.is_zero_upto(deg)) return false;
    return true;
}

template <class S>
typename FrameFieldT<S>::Ser FrameFieldT<S>::E_action(const PAlgebra& P, int A, int M) const {
    if (!eq_) throw Error(ErrorKind::MissingEquivariance, "frame field has no equivariance data");
    const int EA = ix_E(d_, A);
    Ser r = Ser::zero(d_.n, order_, charge_ - label_charge(d_, M));
    // siblings: [E_A, X_i] = sum_j ad(E_A)^j_i X_j
    for (const auto& [j, cf] : P.bracket_basis(EA, eq_->label)) {
        const S s = convert_scalar<S>(cf);
        if (!eq_->family) {
            if (j == M) r += Ser::constant(d_.n, order_, HarmonicPolyT<S>::constant(s));
            continue;
        }
        auto fit = eq_->family->find(j);
        if (fit == eq_->family->end()) continue;
        auto cit = fit->second.find(M);
        if (cit != fit->second.end()) r += cit->second.scaled(s);
    }
    for (const auto& [L, c] : c_)
        for (const auto& [K, cf] : P.bracket_basis(EA, L))
            if (K == M) r -= c.scaled(convert_scalar<S>(cf));
    return r;
}

template <class S>
typename FrameFieldT<S>::Ser FrameFieldT<S>::apply(const PAlgebra&, const Ser& f) const {
    std::optional<int> q;
    if (f.charge()) q = *f.charge() + charge_;
    Ser r(d_.n, order_, f.coords(), q);
    for (const auto& [L, c] : c_) {
        if (int_to_label(d_, L).kind == LabelKind::E) continue;
        r += c * apply_flat_field(d_, L, f);
    }
    return r;
}

template <class S>
Eigen::VectorXcd FrameFieldT<S>::eval(const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d_.dim_p());
    for (const auto& [l, c] : c_) v(l) = c.eval(U, z);
    return v;
}

template <class S>
FrameFieldT<S> FrameFieldT<S>::chopped(double tol) const {
    FrameFieldT r(d_, order_, charge_);
    for (const auto& [l, c] : c_) r.set(l, c.chopped(tol));
    r.eq_ = eq_;
    return r;
}

template <class S>
std::string FrameFieldT<S>::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [l, c] : c_) {
        if (!first) os << "\n";
        first = false;
        os << label_name(d_, l) << ": " << c.str();
    }
    return first ? "0" : os.str();
}

template <class S>
FrameFieldT<S> lie_bracket(const PAlgebra& P, const FrameFieldT<S>& X, const FrameFieldT<S>& Y) {
    using Ser = SeriesT<S>;
    const Dims& d = X.dims();
    if (Y.dims().n != d.n || Y.order() != X.order()) throw Error(ErrorKind::ShapeMismatch, "bracket of mismatched fields");
    const int dim = d.dim_p();
    const int charge = X.charge() + Y.charge();
    std::vector<std::optional<Ser>> acc(dim);
    auto accumulate = [&](int M, const Ser& s) {
        if (s.is_zero() && s.exact()) return;
        if (!acc[M]) acc[M] = Ser::zero(d.n, X.order(), charge - label_charge(d, M));
        *acc[M] += s;
    };
    // X(d^M) - Y(c^M)
    auto derive = [&](const FrameFieldT<S>& A, const FrameFieldT<S>& B, const S& sign) {
        for (const auto& [L, cL] : A.coeffs()) {
            BasisIndex bl = int_to_label(d, L);
            if (bl.kind == LabelKind::E) {
                for (int M = 0; M < dim; ++M) {
                    Ser e = B.E_action(P, bl.idx, M);
                    if (!e.is_zero()) accumulate(M, (cL * e).scaled(sign));
                }
            } else {
                for (const auto& [M, dM] : B.coeffs()) {
                    Ser e = apply_flat_field(d, L, dM);
                    if (!e.is_zero() || !e.exact()) accumulate(M, (cL * e).scaled(sign));
                }
            }
        }
    };
    derive(X, Y, Field<S>::one());
    derive(Y, X, -Field<S>::one());
    for (const auto& [L, cL] : X.coeffs())
        for (const auto& [K, dK] : Y.coeffs()) {
            const auto& st = P.bracket_basis(L, K);
            if (st.empty()) continue;
            Ser prod = cL * dK;
            for (const auto& [M, cf] : st) accumulate(M, prod.scaled(convert_scalar<S>(cf)));
        }
    FrameFieldT<S> r(d, X.order(), charge);
    for (int M = 0; M < dim; ++M)
        if (acc[M]) r.set(M, *acc[M]);
    const auto& ex = X.equivariance();
    const auto& ey = Y.equivariance();
    if (ex && ey && !ex->family && !ey->family && h_type(d, ex->label) && h_type(d, ey->label)) r.mark_invariant();
    return r;
}

template <class S>
void HKFrameT<S>::attach_equivariance() {
    H0.mark_invariant();
    Hpp.mark_invariant();
    Hmm.mark_invariant();
    auto fam = std::make_shared<std::map<int, std::map<int, SeriesT<S>>>>();
    for (int A = 0; A < int(E.size()); ++A) (*fam)[ix_E(d, A)] = E[A].coeffs();
    for (int a = 0; a < int(ep.size()); ++a) (*fam)[ix_ep(d, a)] = ep[a].coeffs();
    for (int a = 0; a < int(em.size()); ++a) (*fam)[ix_em(d, a)] = em[a].coeffs();
    std::shared_ptr<const std::map<int, std::map<int, SeriesT<S>>>> cfam = fam;
    for (int A = 0; A < int(E.size()); ++A) E[A].set_equivariance({ix_E(d, A), cfam});
    for (int a = 0; a < int(ep.size()); ++a) ep[a].set_equivariance({ix_ep(d, a), cfam});
    for (int a = 0; a < int(em.size()); ++a) em[a].set_equivariance({ix_em(d, a), cfam});
}

template <class S>
const FrameFieldT<S>& HKFrameT<S>::field(int label) const {
    BasisIndex b = int_to_label(d, label);
    switch (b.kind) {
        case LabelKind::H0: return H0;
        case LabelKind::Hpp: return Hpp;
        case LabelKind::Hmm: return Hmm;
        case LabelKind::E: return E.at(b.idx);
        case LabelKind::EPlus: return ep.at(b.idx);
        case LabelKind::EMinus: return em.at(b.idx);
    }
    return H0;
}

template <class S>
int HKFrameT<S>::valid() const {
    int v = std::min({H0.valid(), Hpp.valid(), Hmm.valid()});
    for (const auto* fam : {&E, &ep, &em})
        for (const auto& f : *fam) v = std::min(v, f.valid());
    return v;
}

template <class S>
HKFrameT<S> flat_frame(const Dims& d, int order) {
    HKFrameT<S> F;
    F.d = d;
    F.order = order;
    F.kind = FrameKind::Flat;
    F.H0 = FrameFieldT<S>::flat(d, order, ix_H0());
    F.Hpp = FrameFieldT<S>::flat(d, order, ix_Hpp());
    F.Hmm = FrameFieldT<S>::flat(d, order, ix_Hmm());
    for (int A = 0; A < d.N(); ++A) F.E.push_back(FrameFieldT<S>::flat(d, order, ix_E(d, A)));
    for (int a = 0; a < 2 * d.n; ++a) {
        F.ep.push_back(FrameFieldT<S>::flat(d, order, ix_ep(d, a)));
        F.em.push_back(FrameFieldT<S>::flat(d, order, ix_em(d, a)));
    }
    F.attach_equivariance();
    return F;
}

bool ResidualReport::ok(double tol) const {
    for (const auto& e : entries) {
        if (tol == 0.0 && !e.exact_zero) return false;
        if (e.max_residual > tol) return false;
    }
    return true;
}

namespace {

template <class S>
struct ReportBuilder {
    ResidualReport rep;
    std::map<std::string, std::size_t> pos;

    ResidualEntry& entry(const std::string& fam) {
        auto it = pos.find(fam);
        if (it != pos.end()) return rep.entries[it->second];
        pos[fam] = rep.entries.size();
        rep.entries.push_back({fam, 0.0, kExactOrder, true});
        return rep.entries.back();
    }
    void field(const std::string& fam, const FrameFieldT<S>& r) {
        ResidualEntry& e = entry(fam);
        const int v = std::min(r.valid(), r.order());
        e.valid_order = std::min(e.valid_order, v);
        e.max_residual = std::max(e.max_residual, r.max_abs_upto(v));
        if (!r.is_zero_upto(v)) e.exact_zero = false;
    }
    void series(const std::string& fam, const SeriesT<S>& s) {
        ResidualEntry& e = entry(fam);
        const int v = std::min(s.valid(), s.order());
        e.valid_order = std::min(e.valid_order, v);
        e.max_residual = std::max(e.max_residual, s.max_abs_upto(v));
        if (!s.is_zero_upto(v)) e.exact_zero = false;
    }
};

template <class S>
FrameFieldT<S> non_E_part(const FrameFieldT<S>& X) {
    FrameFieldT<S> r(X.dims(), X.order(), X.charge());
    for (const auto& [l, c] : X.coeffs())
        if (int_to_label(X.dims(), l).kind != LabelKind::E) r.set(l, c);
    return r;
}

}  // namespace

template <class S>
ResidualReport check_hk_axioms(const PAlgebra& P, const HKFrameT<S>& F) {
    const Dims& d = F.d;
    const int n2 = 2 * d.n;
    ReportBuilder<S> rb;
    auto br = [&](const FrameFieldT<S>& X, const FrameFieldT<S>& Y) { return lie_bracket(P, X, Y); };
    auto sc = [](const FrameFieldT<S>& X, int k) { return X.scaled(Field<S>::from_int(k)); };

    rb.field("[H0,H++]=2H++", br(F.H0, F.Hpp) - sc(F.Hpp, 2));
    rb.field("[H0,H--]=-2H--", br(F.H0, F.Hmm) - sc(F.Hmm, -2));
    rb.field("[H++,H--]=H0", br(F.Hpp, F.Hmm) - F.H0);
    for (int A = 0; A < d.N(); ++A)
        for (int B = A + 1; B < d.N(); ++B) {
            FrameFieldT<S> r = br(F.E[A], F.E[B]);
            for (const auto& [C, cf] : P.bracket_basis(ix_E(d, A), ix_E(d, B)))
                r -= F.field(C).scaled(convert_scalar<S>(cf));
            rb.field("[E_A,E_B]=c E_C", r);
        }
    for (int a = 0; a < n2; ++a) {
        rb.field("[H0,e+a]=e+a", br(F.H0, F.ep[a]) - F.ep[a]);
        rb.field("[H0,e-a]=-e-a", br(F.H0, F.em[a]) + F.em[a]);
        rb.field("[H++,e+a]=0", br(F.Hpp, F.ep[a]));
        rb.field("[H--,e-a]=0", br(F.Hmm, F.em[a]));
        rb.field("[H++,e-a]=e+a", br(F.Hpp, F.em[a]) - F.ep[a]);
        rb.field("[H--,e+a]=e-a", br(F.Hmm, F.ep[a]) - F.em[a]);
        for (int A = 0; A < d.N(); ++A) {
            FrameFieldT<S> rp = br(F.E[A], F.ep[a]);
            FrameFieldT<S> rm = br(F.E[A], F.em[a]);
            for (int b = 0; b < n2; ++b) {
                const GaussQ& e = P.E(A)(b, a);
                if (e.is_zero()) continue;
                rp -= F.ep[b].scaled(convert_scalar<S>(e));
                rm -= F.em[b].scaled(convert_scalar<S>(e));
            }
            rb.field("[E_A,e+a]=E e+b", rp);
            rb.field("[E_A,e-a]=E e-b", rm);
        }
        for (int b = 0; b < n2; ++b) {
            if (b > a) {
                rb.field("[e+a,e+b]=0", br(F.ep[a], F.ep[b]));
                rb.field("[e-a,e-b]=0", br(F.em[a], F.em[b]));
            }
            // E_A = E0_A in the frames handled here, so closing on E means no other components.
            rb.field("[e+a,e-b] in span E", non_E_part(br(F.ep[a], F.em[b])));
        }
    }
    return rb.rep;
}

template <class S>
CurvatureDataT<S> extract_curvature(const PAlgebra& P, const HKFrameT<S>& F) {
    const Dims& d = F.d;
    const int n2 = 2 * d.n;
    CurvatureDataT<S> C;
    C.n = d.n;
    C.R.assign(n2, std::vector<std::vector<SeriesT<S>>>(n2));
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            FrameFieldT<S> r = lie_bracket(P, F.ep[a], F.em[b]);
            const int v = std::min(r.valid(), r.order());
            C.valid = std::min(C.valid, v);
            FrameFieldT<S> t = non_E_part(r);
            const bool clean = std::is_same_v<S, GaussQ> ? t.is_zero_upto(v) : t.max_abs_upto(v) <= 1e-9;
            if (!clean)
                throw Error(ErrorKind::NonzeroTorsion, "[e+" + std::to_string(a + 1) + ",e-" + std::to_string(b + 1) +
                                                           "] has components outside sp_n");
            for (int A = 0; A < d.N(); ++A) C.R[a][b].push_back(r.coeff(ix_E(d, A)));
        }
    return C;
}

template <class S>
double curvature_symmetry_residual(const PAlgebra& P, const CurvatureDataT<S>& C) {
    const int n2 = 2 * C.n;
    const QMat& w = P.sym().omega_lower;
    const int order = C.R[0][0].empty() ? 0 : C.R[0][0][0].order();
    auto zero = [&] { return SeriesT<S>(C.n, order, Coords::Analytic, std::nullopt); };
    // T[c][d][a][b] = omega_{ce} (R_ab)^e_d
    std::vector<SeriesT<S>> T(std::size_t(n2) * n2 * n2 * n2, zero());
    auto at = [&](int c, int dd, int a, int b) -> SeriesT<S>& { return T[((std::size_t(c) * n2 + dd) * n2 + a) * n2 + b]; };
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b)
            for (int A = 0; A < int(C.R[a][b].size()); ++A) {
                const SeriesT<S> r = C.R[a][b][A].with_charge(std::nullopt);
                if (r.is_zero()) continue;
                const QMat& E = P.E(A);
                for (int c = 0; c < n2; ++c)
                    for (int dd = 0; dd < n2; ++dd) {
                        GaussQ k;
                        for (int e = 0; e < n2; ++e) k += w(c, e) * E(e, dd);
                        if (!k.is_zero()) at(c, dd, a, b) += r.scaled(convert_scalar<S>(k));
                    }
            }
    const int v = std::min(C.valid, order);
    double worst = 0.0;
    for (int c = 0; c < n2; ++c)
        for (int dd = 0; dd < n2; ++dd)
            for (int a = 0; a < n2; ++a)
                for (int b = 0; b < n2; ++b) {
                    const SeriesT<S>& t = at(c, dd, a, b);
                    for (const SeriesT<S>* o : {&at(dd, c, a, b), &at(c, a, dd, b), &at(c, dd, b, a)})
                        worst = std::max(worst, (t - *o).max_abs_upto(v));
                }
    return worst;
}

template <class S>
CanonicalReportT<S> check_canonical(const PAlgebra&, const HKFrameT<S>& F) {
    const Dims& d = F.d;
    const int n2 = 2 * d.n;
    CanonicalReportT<S> rep;
    constexpr bool exact = std::is_same_v<S, GaussQ>;
    auto negligible = [&](const auto& X) {
        const int v = std::min(X.valid(), F.order);
        return exact ? X.is_zero_upto(v) : X.max_abs_upto(v) <= 1e-9;
    };
    auto is_flat = [&](const FrameFieldT<S>& X, int label) { return negligible(X - FrameFieldT<S>::flat(d, F.order, label)); };
    auto coeff_zero = [&](const FrameFieldT<S>& X, int label) { return negligible(X.coeff(label)); };
    auto coeff_one = [&](const FrameFieldT<S>& X, int label) {
        return negligible(X.coeff(label) - SeriesT<S>::constant(d.n, F.order, HarmonicPolyT<S>::constant(Field<S>::one())));
    };
    rep.H0_flat = is_flat(F.H0, ix_H0());
    rep.E_flat = true;
    for (int A = 0; A < d.N(); ++A) rep.E_flat = rep.E_flat && is_flat(F.E[A], ix_E(d, A));
    rep.ep_flat = true;
    for (int a = 0; a < n2; ++a) rep.ep_flat = rep.ep_flat && is_flat(F.ep[a], ix_ep(d, a));
    rep.Hpp_shape = coeff_one(F.Hpp, ix_Hpp()) && coeff_zero(F.Hpp, ix_H0()) && coeff_zero(F.Hpp, ix_Hmm());
    rep.Hmm_shape = coeff_one(F.Hmm, ix_Hmm()) && coeff_zero(F.Hmm, ix_H0()) && coeff_zero(F.Hmm, ix_Hpp());
    rep.em_shape = true;
    rep.vm_minus_zero = true;
    for (int b = 0; b < n2; ++b) {
        for (int h : {ix_H0(), ix_Hpp(), ix_Hmm()}) rep.em_shape = rep.em_shape && coeff_zero(F.em[b], h);
        for (int c = 0; c < n2; ++c) {
            bool ok = c == b ? coeff_one(F.em[b], ix_em(d, c)) : coeff_zero(F.em[b], ix_em(d, c));
            rep.vm_minus_zero = rep.vm_minus_zero && ok;
        }
    }
    rep.vpp_vanishes_on_slice = true;
    for (int b = 0; b < n2; ++b) {
        SeriesT<S> v = F.Hpp.coeff(ix_ep(d, b));
        const int vo = std::min(v.valid(), F.order);
        for (const auto& [k, h] : v.terms()) {
            if (zdegree(k, 4 * d.n) > vo) continue;
            bool zplus_free = true;
            for (int a = 0; a < n2; ++a) zplus_free = zplus_free && zexp(k, a) == 0;
            if (zplus_free && !(exact ? h.is_zero() : h.chopped(1e-9).is_zero())) rep.vpp_vanishes_on_slice = false;
        }
    }
    for (int a = 0; a < n2; ++a) rep.v_potential.push_back(F.Hpp.coeff(ix_em(d, a)));
    return rep;
}

template <class S>
std::vector<std::vector<SeriesT<S>>> E_matrix(const PAlgebra& P, const FrameFieldT<S>& X) {
    const Dims& d = X.dims();
    const int n2 = 2 * d.n;
    std::vector<std::vector<SeriesT<S>>> M(n2);
    for (int r = 0; r < n2; ++r)
        for (int c = 0; c < n2; ++c) M[r].push_back(SeriesT<S>::zero(d.n, X.order(), X.charge()));
    for (const auto& [l, s] : X.coeffs()) {
        BasisIndex b = int_to_label(d, l);
        if (b.kind != LabelKind::E) continue;
        const QMat& E = P.E(b.idx);
        for (int r = 0; r < n2; ++r)
            for (int c = 0; c < n2; ++c)
                if (!E(r, c).is_zero()) M[r][c] += s.scaled(convert_scalar<S>(E(r, c)));
    }
    return M;
}

template <class S>
ResidualReport check_potentials_identities(const PAlgebra& P, const HKFrameT<S>& F) {
    const Dims& d = F.d;
    const int n2 = 2 * d.n;
    const QMat& w = P.sym().omega_lower;
    ReportBuilder<S> rb;
    std::vector<SeriesT<S>> vm, vp;
    for (int b = 0; b < n2; ++b) {
        vm.push_back(F.Hpp.coeff(ix_em(d, b)));
        vp.push_back(F.Hpp.coeff(ix_ep(d, b)));
    }
    auto Amat = E_matrix(P, F.Hpp);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            rb.series("e+a v-b = 0", d_z(+1, a, vm[b]));
            rb.series("A++(E)^b_a = e-a v-b", Amat[b][a] - d_z(-1, a, vm[b]));
            rb.series("e+a v+b = e-a v-b", d_z(+1, a, vp[b]) - d_z(-1, a, vm[b]));
            SeriesT<S> sym = SeriesT<S>::zero(d.n, F.order, 2);
            for (int c = 0; c < n2; ++c) {
                if (!w(c, b).is_zero()) sym += d_z(-1, a, vm[c]).scaled(convert_scalar<S>(w(c, b)));
                if (!w(c, a).is_zero()) sym -= d_z(-1, b, vm[c]).scaled(convert_scalar<S>(w(c, a)));
            }
            rb.series("omega symmetry of e-a v-c", sym);
        }
    return rb.rep;
}

template <class S>
int frame_rank(const HKFrameT<S>& F, const std::vector<std::pair<Eigen::Matrix2cd, Eigen::VectorXcd>>& pts,
               double tol) {
    const int dim = F.d.dim_p();
    int best = dim;
    for (const auto& [U, z] : pts) {
        Eigen::MatrixXcd M(dim, dim);
        for (int l = 0; l < dim; ++l) M.row(l) = F.field(l).eval(U, z).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        const auto& sv = svd.singularValues();
        int r = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * sv(0)) ++r;
        best = std::min(best, r);
    }
    return best;
}

#define HK_INSTANTIATE_FRAMES(S)                                                                         \
    template class FrameFieldT<S>;                                                                       \
    template struct HKFrameT<S>;                                                                         \
    template FrameFieldT<S> lie_bracket(const PAlgebra&, const FrameFieldT<S>&, const FrameFieldT<S>&); \
    template HKFrameT<S> flat_frame<S>(const Dims&, int);                                                \
    template ResidualReport check_hk_axioms(const PAlgebra&, const HKFrameT<S>&);                        \
    template CurvatureDataT<S> extract_curvature(const PAlgebra&, const HKFrameT<S>&);                   \
    template double curvature_symmetry_residual(const PAlgebra&, const CurvatureDataT<S>&);              \
    template CanonicalReportT<S> check_canonical(const PAlgebra&, const HKFrameT<S>&);                   \
    template ResidualReport check_potentials_identities(const PAlgebra&, const HKFrameT<S>&);            \
    template std::vector<std::vector<SeriesT<S>>> E_matrix(const PAlgebra&, const FrameFieldT<S>&);      \
    template int frame_rank(const HKFrameT<S>&, const std::vector<std::pair<Eigen::Matrix2cd, Eigen::VectorXcd>>&, \
                            double);

HK_INSTANTIATE_FRAMES(GaussQ)
HK_INSTANTIATE_FRAMES(cplx)

}  // namespace hk
