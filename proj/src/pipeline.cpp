#include "hk/pipeline.hpp"

namespace hk {

namespace {

template <class S>
using Ser = SeriesT<S>;
template <class S>
using HP = HarmonicPolyT<S>;

template <class S>
HP<S> um(int a, int b, int c, int d, int sign = 1) {
    return HP<S>::monomial(a, b, c, d, Field<S>::from_int(sign));
}

// u^i_+ and u^i_- (upper index)
template <class S>
HP<S> u_plus(int i) { return i == 0 ? um<S>(1, 0, 0, 0) : um<S>(0, 1, 0, 0); }
template <class S>
HP<S> u_minus(int i) { return i == 0 ? um<S>(0, 0, 1, 0) : um<S>(0, 0, 0, 1); }

// phi^{+a} = u2- phi^{1a} - u1- phi^{2a},  phi^{-a} = -u2+ phi^{1a} + u1+ phi^{2a}
template <class S>
Ser<S> lower_plus(const Ser<S>& f1, const Ser<S>& f2) {
    return f1.times(um<S>(0, 0, 0, 1)) + f2.times(um<S>(0, 0, 1, 0, -1));
}
template <class S>
Ser<S> lower_minus(const Ser<S>& f1, const Ser<S>& f2) {
    return f1.times(um<S>(0, 1, 0, 0, -1)) + f2.times(um<S>(1, 0, 0, 0));
}

template <class S>
S wup(const PAlgebra& P, int a, int b) { return convert_scalar<S>(P.sym().omega_upper(a, b)); }
template <class S>
S wlo(const PAlgebra& P, int a, int b) { return convert_scalar<S>(P.sym().omega_lower(a, b)); }

// Float backend: drop round-off residue so that iterations can stabilise exactly.
template <class S>
Ser<S> clean(const Ser<S>& s) {
    if constexpr (Field<S>::exact) return s;
    else return s.chopped(1e-13);
}

template <class S>
bool close(const Ser<S>& a, const Ser<S>& b, int deg) {
    if constexpr (Field<S>::exact) return a.equal_upto(b, deg);
    else return (a.with_charge(std::nullopt) - b.with_charge(std::nullopt)).max_abs_upto(deg) <= 1e-10;
}

template <class S>
Ser<S> unit_series(int n, int D, Coords c) {
    return Ser<S>::constant(n, D, HP<S>::constant(Field<S>::one()), c);
}

template <class S>
SeriesMatrix<S> mat_mul(const SeriesMatrix<S>& A, const SeriesMatrix<S>& B) {
    const int m = int(A.size());
    SeriesMatrix<S> C(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Ser<S> acc = A[i][0] * B[0][j];
            for (int k = 1; k < m; ++k) acc += A[i][k] * B[k][j];
            C[i].push_back(clean(acc));
        }
    return C;
}

template <class S>
bool mat_equal(const SeriesMatrix<S>& A, const SeriesMatrix<S>& B) {
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j)
            if (!A[i][j].equal_upto(B[i][j], kMaxOrder)) return false;
    return true;
}

template <class S>
bool mat_is_zero(const SeriesMatrix<S>& A) {
    for (const auto& r : A)
        for (const auto& s : r)
            if (!s.is_zero()) return false;
    return true;
}

// Sum_k (-1)^{k+1} M^k / k  or  Sum_k (-M)^k; nullopt when the series does not terminate within cap.
template <class S>
std::optional<SeriesMatrix<S>> nilpotent_series(const SeriesMatrix<S>& M, bool log, int cap) {
    const int m = int(M.size());
    SeriesMatrix<S> acc = M, pw = M;
    if (!log) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) acc[i][j] = M[i][j].scaled(-Field<S>::one());
        for (int i = 0; i < m; ++i) acc[i][i] += unit_series<S>(M[0][0].n(), M[0][0].order(), M[0][0].coords());
    }
    for (int k = 2; k <= cap + 1; ++k) {
        pw = mat_mul(pw, M);
        if (mat_is_zero(pw)) return acc;
        S c = log ? Field<S>::from_ratio(k % 2 == 0 ? -1 : 1, k) : Field<S>::from_int(k % 2 == 0 ? 1 : -1);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) acc[i][j] += pw[i][j].scaled(c);
    }
    return std::nullopt;
}

template <class S>
struct Derivs {
    std::vector<Ser<S>> dL;                    // dL/dz^{-c}
    std::vector<std::vector<Ser<S>>> d2L;      // d2L/dz^{-b}dz^{-c}
};

template <class S>
Derivs<S> derivatives(const PrepotentialT<S>& L) {
    const int n2 = 2 * L.d.n;
    Derivs<S> r;
    for (int c = 0; c < n2; ++c) r.dL.push_back(d_z(-1, c, L.L));
    r.d2L.resize(n2);
    for (int b = 0; b < n2; ++b)
        for (int c = 0; c < n2; ++c) r.d2L[b].push_back(d_z(-1, b, r.dL[c]));
    return r;
}

// omega^{ac} dL_c(phi-)  and  omega^{ac} d2L_{bc}(phi-)
template <class S>
std::pair<std::vector<Ser<S>>, SeriesMatrix<S>> sources(const PAlgebra& P, const Derivs<S>& D,
                                                         const std::vector<Ser<S>>& phm) {
    const int n2 = int(phm.size());
    const int n = n2 / 2;
    const int order = phm[0].order();
    const Coords c0 = phm[0].coords();
    std::vector<Ser<S>> dLc, V;
    SeriesMatrix<S> H(n2), A(n2);
    for (int c = 0; c < n2; ++c) dLc.push_back(substitute(D.dL[c], phm).with_charge(3));
    for (int b = 0; b < n2; ++b)
        for (int c = 0; c < n2; ++c) H[b].push_back(substitute(D.d2L[b][c], phm).with_charge(2));
    for (int a = 0; a < n2; ++a) {
        Ser<S> v = Ser<S>::zero(n, order, 3, c0);
        for (int c = 0; c < n2; ++c)
            if (!Field<S>::is_zero(wup<S>(P, a, c))) v += dLc[c].scaled(wup<S>(P, a, c));
        V.push_back(v);
        for (int b = 0; b < n2; ++b) {
            Ser<S> e = Ser<S>::zero(n, order, 2, c0);
            for (int c = 0; c < n2; ++c)
                if (!Field<S>::is_zero(wup<S>(P, a, c))) e += H[b][c].scaled(wup<S>(P, a, c));
            A[a].push_back(e);
        }
    }
    return {V, A};
}

template <class S>
void note(ResidualReport& rep, const std::string& fam, const Ser<S>& r) {
    ResidualEntry* e = nullptr;
    for (auto& x : rep.entries)
        if (x.family == fam) e = &x;
    if (!e) {
        rep.entries.push_back({fam, 0.0, kExactOrder, true});
        e = &rep.entries.back();
    }
    const int v = std::min(r.valid(), r.order());
    e->valid_order = std::min(e->valid_order, v);
    e->max_residual = std::max(e->max_residual, r.max_abs_upto(v));
    if (!r.is_zero_upto(v)) e->exact_zero = false;
}

// E-coordinates of a matrix of series lying in sp_n.
template <class S>
std::vector<Ser<S>> sp_coords(const PAlgebra& P, const SeriesMatrix<S>& M, int charge) {
    const int n2 = int(M.size());
    const int n = n2 / 2;
    const int order = M[0][0].order();
    std::vector<Ser<S>> c;
    for (int A = 0; A < P.N(); ++A) {
        Ser<S> s = Ser<S>::zero(n, order, charge);
        for (const auto& [flat, w] : P.sp_coordinate_weights(A)) s += M[flat / n2][flat % n2].scaled(convert_scalar<S>(w));
        c.push_back(s);
    }
    for (int r = 0; r < n2; ++r)
        for (int k = 0; k < n2; ++k) {
            Ser<S> back = Ser<S>::zero(n, order, charge);
            for (int A = 0; A < P.N(); ++A)
                if (!P.E(A)(r, k).is_zero()) back += c[A].scaled(convert_scalar<S>(P.E(A)(r, k)));
            if (!close(back, M[r][k], std::min({back.valid(), M[r][k].valid(), order})))
                throw Error(ErrorKind::Inconsistent, "matrix of series is not sp_n valued");
        }
    return c;
}

// u-independent series of z obtained by setting U = I2 (central coordinates).
template <class S>
Ser<S> at_identity(const Ser<S>& s) {
    Ser<S> r = Ser<S>::zero(s.n(), s.order(), 0, Coords::Central);
    for (const auto& [k, h] : s.terms()) r.add_term(k, HP<S>::constant(h.value_at_identity()));
    return r;
}

}  // namespace

template <class S>
PrepotentialT<S> validate_prepotential(const SeriesT<S>& L, const Dims& d) {
    if (L.n() != d.n) throw Error(ErrorKind::BadDimensions, "prepotential dimension differs from dims");
    const SeriesT<S> La = to_analytic(L);
    const int n2 = 2 * d.n;
    for (const auto& [k, h] : La.terms()) {
        for (int a = 0; a < n2; ++a)
            if (zexp(k, a)) throw Error(ErrorKind::DependsOnZPlus, "prepotential depends on z+" + std::to_string(a + 1));
        if (k == 0) throw Error(ErrorKind::NonzeroAtOrigin, "prepotential has a z-constant term");
        for (const auto& t : h.terms()) {
            int q = ucharge(t.first);
            for (int a = 0; a < n2; ++a) q += zexp(k, n2 + a);
            if (q != 4) throw Error(ErrorKind::NotCharge4, "prepotential term has charge " + std::to_string(q));
        }
    }
    return PrepotentialT<S>{d, La.with_charge(4)};
}

template <class S>
FrameFieldT<S> build_Hpp(const PAlgebra& P, const PrepotentialT<S>& L) {
    const Dims& d = L.d;
    const int n2 = 2 * d.n;
    const int D = L.order();
    Derivs<S> Dv = derivatives(L);
    FrameFieldT<S> H = FrameFieldT<S>::flat(d, D, ix_Hpp());
    SeriesMatrix<S> A(n2);
    for (int a = 0; a < n2; ++a) {
        Ser<S> vm = Ser<S>::zero(d.n, D, 3);
        for (int c = 0; c < n2; ++c)
            if (!Field<S>::is_zero(wup<S>(P, a, c))) vm += Dv.dL[c].scaled(wup<S>(P, a, c));
        H.set(ix_em(d, a), vm);
        for (int b = 0; b < n2; ++b) {
            Ser<S> e = Ser<S>::zero(d.n, D, 2);
            for (int c = 0; c < n2; ++c)
                if (!Field<S>::is_zero(wup<S>(P, a, c))) e += Dv.d2L[b][c].scaled(wup<S>(P, a, c));
            A[a].push_back(e);
        }
    }
    for (int a = 0; a < n2; ++a) {
        Ser<S> vp = Ser<S>::zero(d.n, D, 1);
        for (int b = 0; b < n2; ++b) vp += A[a][b] * Ser<S>::variable(d.n, D, b);
        H.set(ix_ep(d, a), vp);
    }
    auto coords = sp_coords(P, A, 2);
    for (int B = 0; B < P.N(); ++B) H.set(ix_E(d, B), coords[B]);
    H.mark_invariant();
    return H;
}

template <class S>
BridgeT<S> solve_bridge(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeOptions& opt) {
    const Dims& d = L.d;
    const int n = d.n, n2 = 2 * n, D = L.order();
    const int bound = opt.max_bound > 0 ? opt.max_bound : 64;
    const int cap = opt.max_iterations > 0 ? opt.max_iterations : D + 4 * n + 2;
    const Coords C = Coords::Central;
    Derivs<S> Dv = derivatives(L);

    BridgeT<S> B;
    B.d = d;
    B.order = D;
    std::vector<Ser<S>> init, phi;
    for (int s = 0; s < 2 * n2; ++s) {
        init.push_back(Ser<S>::variable(n, D, s, C));
        phi.push_back(init.back());
    }
    bool done = false;
    for (int it = 1; it <= cap && !done; ++it) {
        std::vector<Ser<S>> phm, php;
        for (int a = 0; a < n2; ++a) {
            phm.push_back(lower_minus(phi[a], phi[n2 + a]));
            php.push_back(lower_plus(phi[a], phi[n2 + a]));
        }
        auto [V, A] = sources(P, Dv, phm);
        std::vector<Ser<S>> next;
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < n2; ++a) {
                Ser<S> X = Ser<S>::zero(n, D, 1, C);
                for (int b = 0; b < n2; ++b) X += A[a][b] * php[b];
                Ser<S> F = X.times(u_plus<S>(i)) + V[a].times(u_minus<S>(i));
                next.push_back(clean(solve_charged(clean(F), 0, init[i * n2 + a], bound)));
            }
        done = true;
        for (int s = 0; s < 2 * n2; ++s) done = done && next[s].equal_upto(phi[s], kMaxOrder);
        phi = std::move(next);
        B.iterations = it;
    }
    if (!done) throw Error(ErrorKind::NoFixedPoint, "bridge iteration did not stabilise in " + std::to_string(cap) + " sweeps");

    std::vector<Ser<S>> phm;
    for (int a = 0; a < n2; ++a) phm.push_back(lower_minus(phi[a], phi[n2 + a]));
    B.phi_ia = phi;
    for (int a = 0; a < n2; ++a) {
        B.phi_minus.push_back(to_analytic(phm[a]));
        B.phi_plus.push_back(to_analytic(lower_plus(phi[a], phi[n2 + a])));
    }

    // Matrix part: H++ Phi = A(phi-) Phi, Phi(I2) = 1.
    SeriesMatrix<S> A = sources(P, Dv, phm).second;
    SeriesMatrix<S> Phi(n2);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b)
            Phi[a].push_back(a == b ? unit_series<S>(n, D, C) : Ser<S>::zero(n, D, 0, C));
    done = false;
    for (int it = 1; it <= cap && !done; ++it) {
        SeriesMatrix<S> rhs = mat_mul(A, Phi), next(n2);
        for (int a = 0; a < n2; ++a)
            for (int b = 0; b < n2; ++b) {
                Ser<S> pin = a == b ? unit_series<S>(n, D, C) : Ser<S>::zero(n, D, 0, C);
                next[a].push_back(clean(solve_charged(rhs[a][b].with_charge(2), 0, pin, bound)));
            }
        done = mat_equal(next, Phi);
        Phi = std::move(next);
    }
    if (!done) throw Error(ErrorKind::NoFixedPoint, "bridge matrix iteration did not stabilise");
    B.Phi.resize(n2);
    SeriesMatrix<S> M(n2);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            B.Phi[a].push_back(to_analytic(Phi[a][b]));
            M[a].push_back(a == b ? B.Phi[a][b] - unit_series<S>(n, D, Coords::Analytic) : B.Phi[a][b]);
        }
    if (auto lg = nilpotent_series(M, true, cap)) {
        B.psi = *lg;
        B.psi_available = true;
    }
    return B;
}

template <class S>
ResidualReport bridge_residuals(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeT<S>& B) {
    const Dims& d = L.d;
    const int n = d.n, n2 = 2 * n;
    ResidualReport rep;
    Derivs<S> Dv = derivatives(L);
    auto [V, A] = sources(P, Dv, B.phi_minus);
    auto hpp = [&](const Ser<S>& s) { return apply_flat_field(d, ix_Hpp(), s); };
    for (int a = 0; a < n2; ++a) {
        note(rep, "H++ phi-a = v-a(phi-)", hpp(B.phi_minus[a]) - V[a]);
        Ser<S> X = Ser<S>::zero(n, B.order, 1);
        for (int b = 0; b < n2; ++b) X += A[a][b] * B.phi_plus[b];
        note(rep, "H++ phi+a = A phi+ - phi-a", hpp(B.phi_plus[a]) - (X - B.phi_minus[a]).with_charge(1));
    }
    SeriesMatrix<S> AP = mat_mul(A, B.Phi);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) note(rep, "H++ Phi = A Phi", hpp(B.Phi[a][b]) - AP[a][b]);
    for (int s = 0; s < 2 * n2; ++s)
        note(rep, "phi^{ia}(I2) = z^{ia}",
             (at_identity(B.phi_ia[s]) - Ser<S>::variable(n, B.order, s, Coords::Central)).with_charge(0));
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            Ser<S> diff = at_identity(to_central(B.Phi[a][b]));
            if (a == b) diff -= unit_series<S>(n, B.order, Coords::Central);
            note(rep, "Phi(I2) = 1", diff);
        }
    return rep;
}

template <class S>
std::vector<SeriesT<S>> invert_bridge(const BridgeT<S>& B, int max_iterations) {
    const int n = B.d.n, n2 = 2 * n, D = B.order;
    const int cap = max_iterations > 0 ? max_iterations : D + 4 * n + 2;
    std::vector<Ser<S>> w, delta;
    for (int s = 0; s < 2 * n2; ++s) w.push_back(Ser<S>::variable(n, D, s));
    for (int a = 0; a < n2; ++a) delta.push_back(B.phi_plus[a] - w[a]);
    for (int a = 0; a < n2; ++a) delta.push_back(B.phi_minus[a] - w[n2 + a]);
    std::vector<Ser<S>> z = w;
    for (int it = 0; it < cap; ++it) {
        std::vector<Ser<S>> next;
        bool same = true;
        for (int s = 0; s < 2 * n2; ++s) {
            Ser<S> c = clean(compose(delta[s], z));
            next.push_back(c.is_zero() ? w[s] : (w[s] - c.with_charge(w[s].charge())));
            same = same && next[s].equal_upto(z[s], kMaxOrder);
        }
        z = std::move(next);
        if (same) return z;
    }
    throw Error(ErrorKind::NonPolynomialInverse, "inverse of the bridge is not polynomial at this order");
}

template <class S>
HKFrameT<S> build_frame(const PAlgebra& P, const PrepotentialT<S>& L, const BridgeT<S>& B, const FrameFieldT<S>& Hpp) {
    const Dims& d = L.d;
    const int n = d.n, n2 = 2 * n, D = L.order();
    const int cap = D + 4 * n + 2;
    std::vector<Ser<S>> Zw = invert_bridge(B);

    // v^{±a}_{--} = -u^±_i (H0-- phi^{ia}) composed with phi^{-1}
    std::vector<Ser<S>> G;
    for (int s = 0; s < 2 * n2; ++s) G.push_back(to_analytic(apply_flat_field(d, ix_Hmm(), B.phi_ia[s])));
    FrameFieldT<S> Hmm = FrameFieldT<S>::flat(d, D, ix_Hmm());
    for (int a = 0; a < n2; ++a) {
        Ser<S> vp = lower_plus(G[a], G[n2 + a]);
        Ser<S> vm = lower_minus(G[a], G[n2 + a]);
        Hmm.set(ix_ep(d, a), compose(vp, Zw).with_charge(-3));
        Hmm.set(ix_em(d, a), compose(vm, Zw).with_charge(-1));
    }
    // A_{--}(E) = ((H0-- Phi) Phi^{-1}) composed with phi^{-1}
    SeriesMatrix<S> M(n2), dPhi(n2);
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) {
            M[a].push_back(a == b ? B.Phi[a][b] - unit_series<S>(n, D, Coords::Analytic) : B.Phi[a][b]);
            dPhi[a].push_back(apply_flat_field(d, ix_Hmm(), B.Phi[a][b]));
        }
    auto inv = nilpotent_series(M, false, cap);
    if (!inv) throw Error(ErrorKind::NonPolynomialInverse, "bridge matrix has no polynomial inverse at this order");
    SeriesMatrix<S> Am = mat_mul(dPhi, *inv);
    for (auto& row : Am)
        for (auto& s : row) s = compose(s, Zw).with_charge(-2);
    auto coords = sp_coords(P, Am, -2);
    for (int A = 0; A < P.N(); ++A) Hmm.set(ix_E(d, A), coords[A]);
    Hmm.mark_invariant();

    HKFrameT<S> F = flat_frame<S>(d, D);
    F.kind = FrameKind::Canonical;
    F.Hpp = Hpp;
    F.Hmm = Hmm;
    for (int a = 0; a < n2; ++a) F.em[a] = lie_bracket(P, Hmm, F.ep[a]);
    // An e0- deformation of e-a means the normalised frame is not canonical for this L.
    for (int a = 0; a < n2; ++a)
        for (int c = 0; c < n2; ++c) {
            Ser<S> v = F.em[a].coeff(ix_em(d, c));
            if (a == c) v = v - unit_series<S>(n, D, Coords::Analytic).with_charge(v.charge());
            if (!v.is_zero_upto(std::min(v.valid(), D)) && (Field<S>::exact || v.max_abs_upto(std::min(v.valid(), D)) > 1e-9))
                F.kind = FrameKind::General;
        }
    F.attach_equivariance();
    return F;
}

template <class S>
HKFrameT<S> build_canonical_frame(const PAlgebra& P, const PrepotentialT<S>& L, BridgeT<S>* bridge_out) {
    FrameFieldT<S> Hpp = build_Hpp(P, L);
    BridgeT<S> B = solve_bridge(P, L);
    HKFrameT<S> F = build_frame(P, L, B, Hpp);
    if (bridge_out) *bridge_out = std::move(B);
    return F;
}

template <class S>
PrepotentialT<S> extract_prepotential(const PAlgebra& P, const HKFrameT<S>& F) {
    const Dims& d = F.d;
    const int n2 = 2 * d.n, D = F.order;
    const double tol = Field<S>::exact ? 0.0 : 1e-9;
    ResidualReport id = check_potentials_identities(P, F);
    for (const auto& e : id.entries)
        if ((e.family == "omega symmetry of e-a v-c" || e.family == "e+a v-b = 0") &&
            (tol == 0.0 ? !e.exact_zero : e.max_residual > tol))
            throw Error(ErrorKind::NotClosed, "v-potential one-form is not closed: " + e.family);
    // dL/dz^{-a} = omega_{ab} v^{-b}
    std::vector<Ser<S>> dL;
    for (int a = 0; a < n2; ++a) {
        Ser<S> s = Ser<S>::zero(d.n, D, 3);
        for (int b = 0; b < n2; ++b)
            if (!Field<S>::is_zero(wlo<S>(P, a, b))) s += F.Hpp.coeff(ix_em(d, b)).scaled(wlo<S>(P, a, b));
        dL.push_back(s);
    }
    Ser<S> L = Ser<S>::zero(d.n, D, 4);
    for (int a = 0; a < n2; ++a)
        for (const auto& [k, h] : dL[a].terms()) {
            const int deg = zdegree(k, 2 * n2);
            L.add_term(k + zunit(n2 + a), h.scaled(Field<S>::from_ratio(1, deg + 1)));
        }
    if (F.Hpp.valid() < kExactOrder) L = L.with_valid(std::min(L.valid(), F.Hpp.valid() + 1));
    for (int a = 0; a < n2; ++a) {
        Ser<S> r = d_z(-1, a, L) - dL[a];
        if (r.max_abs_upto(std::min(r.valid(), D - 1)) > tol || (tol == 0.0 && !r.is_zero_upto(std::min(r.valid(), D - 1))))
            throw Error(ErrorKind::NotClosed, "v-potential is not a gradient");
    }
    return validate_prepotential(L, d);
}

#define HK_INSTANTIATE_PIPELINE(S)                                                                                 \
    template PrepotentialT<S> validate_prepotential(const SeriesT<S>&, const Dims&);                                \
    template FrameFieldT<S> build_Hpp(const PAlgebra&, const PrepotentialT<S>&);                                    \
    template BridgeT<S> solve_bridge(const PAlgebra&, const PrepotentialT<S>&, const BridgeOptions&);               \
    template ResidualReport bridge_residuals(const PAlgebra&, const PrepotentialT<S>&, const BridgeT<S>&);          \
    template std::vector<SeriesT<S>> invert_bridge(const BridgeT<S>&, int);                                         \
    template HKFrameT<S> build_frame(const PAlgebra&, const PrepotentialT<S>&, const BridgeT<S>&,                   \
                                     const FrameFieldT<S>&);                                                        \
    template HKFrameT<S> build_canonical_frame(const PAlgebra&, const PrepotentialT<S>&, BridgeT<S>*);              \
    template PrepotentialT<S> extract_prepotential(const PAlgebra&, const HKFrameT<S>&);

HK_INSTANTIATE_PIPELINE(GaussQ)
HK_INSTANTIATE_PIPELINE(cplx)

}  // namespace hk
