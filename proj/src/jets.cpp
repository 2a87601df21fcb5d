#include "hk/jets.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace hk {

int zdegree(ZKey k, int nvars) {
    int d = 0;
    for (int i = 0; i < nvars; ++i) d += zexp(k, i);
    return d;
}

int EquivarianceTag::components(int n) const {
    int c = 1;
    for (int i = 0; i < upper + lower; ++i) c *= 2 * n;
    return c;
}

namespace {

int sat_add(int a, int b) {
    long s = long(a) + long(b);
    return int(std::min<long>(s, kExactOrder));
}

int zcharge(ZKey k, int n, Coords c) {
    if (c == Coords::Central) return 0;
    int q = 0;
    for (int a = 0; a < 2 * n; ++a) q += zexp(k, 2 * n + a) - zexp(k, a);
    return q;
}

template <class S>
HarmonicPolyT<S> u_var(int which) {
    int e[4] = {0, 0, 0, 0};
    e[which] = 1;
    return HarmonicPolyT<S>::monomial(e[0], e[1], e[2], e[3], Field<S>::one());
}

}  // namespace

template <class S>
SeriesT<S>::SeriesT(int n, int order, Coords c, std::optional<int> charge)
    : n_(n), order_(order), coords_(c), charge_(charge) {
    if (n < 1 || n > 4) throw Error(ErrorKind::BadDimensions, "series dimension out of range");
    if (order < 0 || order > kMaxOrder) throw Error(ErrorKind::OrderExceeded, "truncation order out of range");
}

template <class S>
SeriesT<S> SeriesT<S>::constant(int n, int order, const HP& h, Coords c) {
    return term(n, order, 0, h, c);
}

template <class S>
SeriesT<S> SeriesT<S>::variable(int n, int order, int slot, Coords c) {
    return term(n, order, zunit(slot), HP::constant(Field<S>::one()), c);
}

template <class S>
SeriesT<S> SeriesT<S>::term(int n, int order, ZKey key, const HP& h, Coords c) {
    std::optional<int> q;
    if (auto hc = h.charge()) q = *hc + zcharge(key, n, c);
    else if (h.is_zero()) q = zcharge(key, n, c);
    SeriesT s(n, order, c, q);
    s.add_term(key, h);
    return s;
}

template <class S>
int SeriesT<S>::lowest_degree() const {
    int d = INT_MAX / 4;
    for (const auto& t : terms_) d = std::min(d, zdegree(t.first, nvars()));
    return d;
}

template <class S>
int SeriesT<S>::degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, zdegree(t.first, nvars()));
    return d;
}

template <class S>
typename SeriesT<S>::HP SeriesT<S>::coeff(ZKey k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? HP() : it->second;
}

template <class S>
std::optional<int> SeriesT<S>::computed_charge() const {
    std::optional<int> q;
    for (const auto& [k, h] : terms_)
        for (const auto& t : h.terms()) {
            int c = ucharge(t.first) + zcharge(k, n_, coords_);
            if (!q) q = c;
            else if (*q != c) return std::nullopt;
        }
    return q;
}

template <class S>
void SeriesT<S>::check_charge() const {
    if (!charge_) return;
    for (const auto& [k, h] : terms_)
        for (const auto& t : h.terms())
            if (ucharge(t.first) + zcharge(k, n_, coords_) != *charge_)
                throw Error(ErrorKind::ChargeMismatch, "term charge differs from declared charge " +
                                                           std::to_string(*charge_));
}

template <class S>
void SeriesT<S>::add_term(ZKey k, const HP& h) {
    if (h.is_zero()) return;
    if (zdegree(k, nvars()) > order_) {
        valid_ = std::min(valid_, order_);
        return;
    }
    if (charge_) {
        const int zc = zcharge(k, n_, coords_);
        for (const auto& t : h.terms())
            if (ucharge(t.first) + zc != *charge_)
                throw Error(ErrorKind::ChargeMismatch, "added term has charge " +
                                                           std::to_string(ucharge(t.first) + zc) + ", expected " +
                                                           std::to_string(*charge_));
    }
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, h);
    } else {
        it->second += h;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

template <class S>
SeriesT<S>& SeriesT<S>::operator+=(const SeriesT& o) {
    if (o.n_ != n_ || o.order_ != order_ || o.coords_ != coords_)
        throw Error(ErrorKind::ShapeMismatch, "series shapes differ");
    if (charge_ && o.charge_ && *charge_ != *o.charge_) {
        if (terms_.empty()) charge_ = o.charge_;
        else if (!o.terms_.empty())
            throw Error(ErrorKind::ChargeMismatch, "adding series of charges " + std::to_string(*charge_) +
                                                       " and " + std::to_string(*o.charge_));
    } else if (!o.charge_ && !o.terms_.empty()) {
        charge_ = std::nullopt;
    }
    for (const auto& [k, h] : o.terms_) {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, h);
        } else {
            it->second += h;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    valid_ = std::min(valid_, o.valid_);
    return *this;
}

template <class S>
SeriesT<S>& SeriesT<S>::operator-=(const SeriesT& o) {
    return *this += o.scaled(-Field<S>::one());
}

template <class S>
SeriesT<S> SeriesT<S>::operator*(const SeriesT& o) const {
    if (o.n_ != n_ || o.order_ != order_ || o.coords_ != coords_)
        throw Error(ErrorKind::ShapeMismatch, "series shapes differ");
    std::optional<int> q;
    if (charge_ && o.charge_) q = *charge_ + *o.charge_;
    SeriesT r(n_, order_, coords_, q);
    r.valid_ = std::min(sat_add(valid_, o.lowest_degree()), sat_add(o.valid_, lowest_degree()));
    const int nv = nvars();
    bool dropped = false;
    for (const auto& [ka, ha] : terms_) {
        const int da = zdegree(ka, nv);
        for (const auto& [kb, hb] : o.terms_) {
            if (da + zdegree(kb, nv) > order_) {
                dropped = true;
                continue;
            }
            HP p = ha * hb;
            if (p.is_zero()) continue;
            auto it = r.terms_.find(ka + kb);
            if (it == r.terms_.end()) r.terms_.emplace(ka + kb, std::move(p));
            else {
                it->second += p;
                if (it->second.is_zero()) r.terms_.erase(it);
            }
        }
    }
    if (dropped) r.valid_ = std::min(r.valid_, order_);
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::scaled(const S& s) const {
    SeriesT r(n_, order_, coords_, charge_);
    r.valid_ = valid_;
    if (Field<S>::is_zero(s)) return r;
    for (const auto& [k, h] : terms_) r.terms_.emplace(k, h.scaled(s));
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::times(const HP& h) const {
    std::optional<int> q;
    if (charge_) {
        if (auto hc = h.charge()) q = *charge_ + *hc;
        else if (h.is_zero()) q = charge_;
    }
    SeriesT r(n_, order_, coords_, q);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_) {
        HP p = c * h;
        if (!p.is_zero()) r.terms_.emplace(k, std::move(p));
    }
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::with_charge(std::optional<int> c) const {
    SeriesT r = *this;
    r.charge_ = c;
    r.check_charge();
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::with_valid(int v) const {
    SeriesT r = *this;
    r.valid_ = v;
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::truncated(int deg) const {
    SeriesT r(n_, order_, coords_, charge_);
    r.valid_ = std::min(valid_, deg);
    for (const auto& [k, h] : terms_)
        if (zdegree(k, nvars()) <= deg) r.terms_.emplace(k, h);
    return r;
}

template <class S>
SeriesT<S> SeriesT<S>::with_order(int order) const {
    SeriesT r(n_, order, coords_, charge_);
    r.valid_ = valid_;
    for (const auto& [k, h] : terms_) r.add_term(k, h);
    return r;
}

template <class S>
bool SeriesT<S>::equal_upto(const SeriesT& o, int deg) const {
    SeriesT d = *this;
    d.charge_ = std::nullopt;
    SeriesT e = o;
    e.charge_ = std::nullopt;
    d -= e;
    return d.is_zero_upto(deg);
}

template <class S>
bool SeriesT<S>::is_zero_upto(int deg) const {
    for (const auto& [k, h] : terms_)
        if (zdegree(k, nvars()) <= deg && !h.is_zero()) return false;
    return true;
}

template <class S>
double SeriesT<S>::max_abs_upto(int deg) const {
    double m = 0.0;
    for (const auto& [k, h] : terms_) {
        if (zdegree(k, nvars()) > deg) continue;
        for (const auto& t : h.terms()) m = std::max(m, Field<S>::magnitude(t.second));
    }
    return m;
}

template <class S>
cplx SeriesT<S>::eval(const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z) const {
    const int nv = nvars();
    std::vector<std::vector<cplx>> pw(nv, std::vector<cplx>(order_ + 1, 1.0));
    for (int i = 0; i < nv; ++i)
        for (int e = 1; e <= order_; ++e) pw[i][e] = pw[i][e - 1] * z(i);
    cplx acc = 0.0;
    for (const auto& [k, h] : terms_) {
        cplx m = h.eval(U);
        for (int i = 0; i < nv; ++i) {
            int e = zexp(k, i);
            if (e) m *= pw[i][e];
        }
        acc += m;
    }
    return acc;
}

template <class S>
std::string SeriesT<S>::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    const int n2 = 2 * n_;
    const char* lo = coords_ == Coords::Analytic ? "+" : "1";
    const char* hi = coords_ == Coords::Analytic ? "-" : "2";
    bool first = true;
    for (const auto& [k, h] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << h.str() << ")";
        for (int i = 0; i < 2 * n2; ++i) {
            int e = zexp(k, i);
            if (!e) continue;
            os << "*z" << (i < n2 ? lo : hi) << (i % n2 + 1);
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

template <class S>
SeriesT<S> SeriesT<S>::chopped(double tol) const {
    SeriesT r(n_, order_, coords_, charge_);
    r.valid_ = valid_;
    for (const auto& [k, h] : terms_) {
        HP c = h.chopped(tol);
        if (!c.is_zero()) r.terms_.emplace(k, std::move(c));
    }
    return r;
}

template <class S>
SeriesT<S> d_slot(int slot, const SeriesT<S>& s) {
    const int n2 = 2 * s.n();
    if (slot < 0 || slot >= 2 * n2) throw Error(ErrorKind::BadIndex, "z slot out of range");
    std::optional<int> q = s.charge();
    if (q && s.coords() == Coords::Analytic) q = *q + (slot < n2 ? 1 : -1);
    SeriesT<S> r(s.n(), s.order(), s.coords(), q);
    for (const auto& [k, h] : s.terms()) {
        int e = zexp(k, slot);
        if (e == 0) continue;
        r.add_term(k - zunit(slot), h.scaled(Field<S>::from_int(e)));
    }
    return r.with_valid(s.exact() ? kExactOrder : s.valid() - 1);
}

template <class S>
SeriesT<S> d_z(int sign, int a, const SeriesT<S>& s) {
    if (a < 0 || a >= 2 * s.n()) throw Error(ErrorKind::BadIndex, "z index out of range");
    return d_slot(sign > 0 ? a : 2 * s.n() + a, s);
}

template <class S>
SeriesT<S> apply_flat_field(const Dims& d, int label, const SeriesT<S>& s, const EquivarianceTag& tag) {
    using HP = HarmonicPolyT<S>;
    const BasisIndex b = int_to_label(d, label);
    const int n2 = 2 * s.n();
    auto shifted = [&](int dq) {
        std::optional<int> q = s.charge();
        if (q) q = *q + dq;
        return SeriesT<S>(s.n(), s.order(), s.coords(), q).with_valid(s.valid());
    };
    switch (b.kind) {
        case LabelKind::H0: {
            SeriesT<S> r = shifted(0);
            for (const auto& [k, h] : s.terms()) {
                const int zc = s.coords() == Coords::Analytic ? zcharge(k, s.n(), Coords::Analytic) : 0;
                std::vector<typename HP::Term> t;
                for (const auto& [uk, c] : h.terms()) {
                    int q = ucharge(uk) + zc;
                    if (q) t.emplace_back(uk, c * Field<S>::from_int(q));
                }
                r.add_term(k, HP::from_sorted(std::move(t)));
            }
            return r;
        }
        case LabelKind::Hpp:
        case LabelKind::Hmm: {
            const bool up = b.kind == LabelKind::Hpp;
            SeriesT<S> r = shifted(up ? 2 : -2);
            for (const auto& [k, h] : s.terms()) {
                r.add_term(k, up ? d_Hpp(h) : d_Hmm(h));
                if (s.coords() != Coords::Analytic) continue;
                // -z^{-a} d/dz^{+a}  or  -z^{+a} d/dz^{-a}
                for (int a = 0; a < n2; ++a) {
                    const int from = up ? a : n2 + a;
                    const int to = up ? n2 + a : a;
                    int e = zexp(k, from);
                    if (!e) continue;
                    r.add_term(k - zunit(from) + zunit(to), h.scaled(Field<S>::from_int(-e)));
                }
            }
            return r;
        }
        case LabelKind::EPlus:
        case LabelKind::EMinus: {
            const bool plus = b.kind == LabelKind::EPlus;
            if (s.coords() == Coords::Analytic) return d_slot(plus ? b.idx : n2 + b.idx, s);
            // u^j_pm d/dz^{ja}
            SeriesT<S> r1 = d_slot(b.idx, s).times(u_var<S>(plus ? 0 : 2));
            SeriesT<S> r2 = d_slot(n2 + b.idx, s).times(u_var<S>(plus ? 1 : 3));
            return r1 + r2;
        }
        case LabelKind::E:
            if (!tag.scalar())
                throw Error(ErrorKind::MissingEquivariance, "E action on a tensor component needs apply_E_tensor");
            return shifted(0);
    }
    return s;
}

template <class S>
std::vector<SeriesT<S>> apply_E_tensor(const PAlgebra& P, int A, const std::vector<SeriesT<S>>& comps,
                                       const EquivarianceTag& tag) {
    const int m = 2 * P.dims().n;
    const int slots = tag.upper + tag.lower;
    if (int(comps.size()) != tag.components(P.dims().n))
        throw Error(ErrorKind::ShapeMismatch, "component count does not match the equivariance tag");
    if (slots == 0) {
        std::vector<SeriesT<S>> r;
        for (const auto& c : comps) r.push_back(c.scaled(Field<S>::zero()));
        return r;
    }
    const QMat& E = P.E(A);
    std::vector<SeriesT<S>> out;
    out.reserve(comps.size());
    std::vector<int> idx(slots);
    for (std::size_t flat = 0; flat < comps.size(); ++flat) {
        std::size_t rem = flat;
        for (int s = slots - 1; s >= 0; --s) {
            idx[s] = int(rem % m);
            rem /= m;
        }
        SeriesT<S> acc = comps[flat].scaled(Field<S>::zero());
        for (int s = 0; s < slots; ++s) {
            for (int c = 0; c < m; ++c) {
                // upper: -E^{i_s}_c T^{..c..};  lower: + T_{..c..} E^c_{i_s}
                const GaussQ& e = s < tag.upper ? E(idx[s], c) : E(c, idx[s]);
                if (e.is_zero()) continue;
                std::size_t other = 0;
                for (int t = 0; t < slots; ++t) other = other * m + (t == s ? c : idx[t]);
                S coef = convert_scalar<S>(e);
                if (s < tag.upper) coef = -coef;
                acc += comps[other].scaled(coef);
            }
        }
        out.push_back(std::move(acc));
    }
    return out;
}

template <class S>
SeriesT<S> compose(const SeriesT<S>& f, const std::vector<SeriesT<S>>& args) {
    const int nv = f.nvars();
    if (int(args.size()) != nv) throw Error(ErrorKind::ShapeMismatch, "compose needs one argument per variable");
    const SeriesT<S>& a0 = args[0];
    std::vector<int> maxe(nv, 0);
    for (const auto& t : f.terms())
        for (int i = 0; i < nv; ++i) maxe[i] = std::max(maxe[i], zexp(t.first, i));
    int min_ld = INT_MAX / 4;
    for (int i = 0; i < nv; ++i) {
        if (args[i].n() != a0.n() || args[i].order() != a0.order() || args[i].coords() != a0.coords())
            throw Error(ErrorKind::ShapeMismatch, "compose arguments differ in shape");
        if (maxe[i]) min_ld = std::min(min_ld, args[i].lowest_degree());
    }
    // monomials in the arguments, built by peeling off the highest occupied slot
    std::unordered_map<ZKey, SeriesT<S>> mono;
    mono.emplace(ZKey(0), SeriesT<S>::constant(a0.n(), a0.order(), HarmonicPolyT<S>::constant(Field<S>::one()),
                                               a0.coords()));
    std::function<const SeriesT<S>&(ZKey)> get = [&](ZKey k) -> const SeriesT<S>& {
        auto it = mono.find(k);
        if (it != mono.end()) return it->second;
        int top = nv - 1;
        while (!zexp(k, top)) --top;
        SeriesT<S> m = get(k - zunit(top)) * args[top];
        return mono.emplace(k, std::move(m)).first->second;
    };
    SeriesT<S> r(a0.n(), a0.order(), a0.coords(), std::nullopt);
    for (const auto& [k, h] : f.terms()) r += get(k).with_charge(std::nullopt).times(h);
    int v = r.valid();
    if (!f.exact()) {
        long lim = (min_ld >= INT_MAX / 4) ? kExactOrder : long(f.valid() + 1) * min_ld - 1;
        v = std::min<long>(v, lim);
    }
    auto q = r.computed_charge();
    if (!q && r.is_zero()) q = f.charge();
    return r.with_charge(q).with_valid(v);
}

template <class S>
SeriesT<S> substitute(const SeriesT<S>& f, const std::vector<SeriesT<S>>& args) {
    const int n2 = 2 * f.n();
    if (int(args.size()) != n2) throw Error(ErrorKind::ShapeMismatch, "substitute needs 2n arguments");
    for (const auto& [k, h] : f.terms())
        for (int a = 0; a < n2; ++a)
            if (zexp(k, a)) throw Error(ErrorKind::DependsOnZPlus, "substitute expects a z- only series");
    for (const auto& a : args)
        if (a.charge() && *a.charge() != 1 && !a.is_zero())
            throw Error(ErrorKind::ChargeMismatch, "substitute arguments must have charge +1");
    std::vector<SeriesT<S>> full;
    for (int a = 0; a < n2; ++a) full.push_back(SeriesT<S>::zero(args[0].n(), args[0].order(), -1, args[0].coords()));
    for (int a = 0; a < n2; ++a) full.push_back(args[a]);
    SeriesT<S> r = compose(f, full);
    if (f.charge() && !r.is_zero()) return r.with_charge(f.charge());
    return r;
}

template <class S>
std::vector<SeriesT<S>> central_in_analytic(int n, int order) {
    const int n2 = 2 * n;
    std::vector<SeriesT<S>> r;
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < n2; ++a) {
            // z^{ia} = u^i_+ z^{+a} + u^i_- z^{-a}
            SeriesT<S> s = SeriesT<S>::term(n, order, zunit(a), u_var<S>(i));
            s += SeriesT<S>::term(n, order, zunit(n2 + a), u_var<S>(2 + i));
            r.push_back(s);
        }
    return r;
}

template <class S>
std::vector<SeriesT<S>> analytic_in_central(int n, int order) {
    using HP = HarmonicPolyT<S>;
    const int n2 = 2 * n;
    const Coords C = Coords::Central;
    std::vector<SeriesT<S>> r;
    const S one = Field<S>::one();
    for (int a = 0; a < n2; ++a) {
        // z^{+a} = u2- z^{1a} - u1- z^{2a}
        SeriesT<S> s = SeriesT<S>::term(n, order, zunit(a), HP::monomial(0, 0, 0, 1, one), C);
        s += SeriesT<S>::term(n, order, zunit(n2 + a), HP::monomial(0, 0, 1, 0, -one), C);
        r.push_back(s);
    }
    for (int a = 0; a < n2; ++a) {
        // z^{-a} = -u2+ z^{1a} + u1+ z^{2a}
        SeriesT<S> s = SeriesT<S>::term(n, order, zunit(a), HP::monomial(0, 1, 0, 0, -one), C);
        s += SeriesT<S>::term(n, order, zunit(n2 + a), HP::monomial(1, 0, 0, 0, one), C);
        r.push_back(s);
    }
    return r;
}

template <class S>
SeriesT<S> to_central(const SeriesT<S>& s) {
    if (s.coords() == Coords::Central) return s;
    SeriesT<S> r = compose(s, analytic_in_central<S>(s.n(), s.order()));
    if (r.is_zero()) return SeriesT<S>(s.n(), s.order(), Coords::Central, s.charge()).with_valid(s.valid());
    return r;
}

template <class S>
SeriesT<S> to_analytic(const SeriesT<S>& s) {
    if (s.coords() == Coords::Analytic) return s;
    SeriesT<S> r = compose(s, central_in_analytic<S>(s.n(), s.order()));
    if (r.is_zero()) return SeriesT<S>(s.n(), s.order(), Coords::Analytic, s.charge()).with_valid(s.valid());
    return r;
}

template <class S>
SeriesT<S> solve_charged(const SeriesT<S>& g, int k, const SeriesT<S>& init, int max_bound) {
    if (!g.is_zero()) {
        auto gq = g.charge() ? g.charge() : g.computed_charge();
        if (!gq || *gq != k + 2)
            throw Error(ErrorKind::ChargeMismatch, "solve_charged source must have charge k + 2");
    }
    SeriesT<S> gc = to_central(g);
    std::map<ZKey, bool> keys;
    for (const auto& t : gc.terms()) keys[t.first] = true;
    for (const auto& t : init.terms()) keys[t.first] = true;
    SeriesT<S> f(g.n(), g.order(), Coords::Central, k);
    for (const auto& kv : keys) {
        const ZKey key = kv.first;
        S pin = init.coeff(key).value_at_identity();
        auto h = solve_raising_pinned(gc.coeff(key), k, pin, max_bound);
        f.add_term(key, h);
    }
    f = f.with_valid(std::min(gc.valid(), init.valid()));
    return g.coords() == Coords::Analytic ? to_analytic(f) : f;
}

template <class S>
cplx eval_series(const SeriesT<S>& s, const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z) {
    if (std::abs(U.determinant() - 1.0) > 1e-10) throw Error(ErrorKind::BadDimensions, "eval_series needs det U = 1");
    if (z.size() != s.nvars()) throw Error(ErrorKind::ShapeMismatch, "z has the wrong length");
    return s.eval(U, z);
}

template <class S>
Eigen::VectorXcd invert_map_numeric(const std::vector<SeriesT<S>>& comps, const Eigen::Matrix2cd& U,
                                    const Eigen::VectorXcd& target, const NewtonOptions& opt, int* iterations) {
    const int nv = int(comps.size());
    if (nv == 0 || nv != comps[0].nvars()) throw Error(ErrorKind::ShapeMismatch, "need one component per variable");
    std::vector<std::vector<SeriesT<S>>> jac(nv);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) jac[i].push_back(d_slot(j, comps[i]));
    Eigen::VectorXcd z = target;
    for (int it = 0; it <= opt.max_iter; ++it) {
        Eigen::VectorXcd F(nv);
        for (int i = 0; i < nv; ++i) F(i) = comps[i].eval(U, z) - target(i);
        if (F.norm() < opt.tol) {
            if (iterations) *iterations = it;
            return z;
        }
        if (it == opt.max_iter) break;
        Eigen::MatrixXcd J(nv, nv);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) J(i, j) = jac[i][j].eval(U, z);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(J);
        lu.setThreshold(1e-13);
        if (!lu.isInvertible()) throw Error(ErrorKind::SingularJacobian, "Jacobian is singular");
        z -= lu.solve(F);
    }
    throw Error(ErrorKind::NoConvergence, "Newton iteration did not converge");
}

#define HK_INSTANTIATE_JETS(S)                                                                                 \
    template class SeriesT<S>;                                                                                 \
    template SeriesT<S> d_z(int, int, const SeriesT<S>&);                                                     \
    template SeriesT<S> d_slot(int, const SeriesT<S>&);                                                       \
    template SeriesT<S> apply_flat_field(const Dims&, int, const SeriesT<S>&, const EquivarianceTag&);        \
    template std::vector<SeriesT<S>> apply_E_tensor(const PAlgebra&, int, const std::vector<SeriesT<S>>&,      \
                                                    const EquivarianceTag&);                                   \
    template SeriesT<S> compose(const SeriesT<S>&, const std::vector<SeriesT<S>>&);                           \
    template SeriesT<S> substitute(const SeriesT<S>&, const std::vector<SeriesT<S>>&);                        \
    template SeriesT<S> to_central(const SeriesT<S>&);                                                        \
    template SeriesT<S> to_analytic(const SeriesT<S>&);                                                       \
    template SeriesT<S> solve_charged(const SeriesT<S>&, int, const SeriesT<S>&, int);                        \
    template cplx eval_series(const SeriesT<S>&, const Eigen::Matrix2cd&, const Eigen::VectorXcd&);           \
    template Eigen::VectorXcd invert_map_numeric(const std::vector<SeriesT<S>>&, const Eigen::Matrix2cd&,     \
                                                 const Eigen::VectorXcd&, const NewtonOptions&, int*);        \
    template std::vector<SeriesT<S>> central_in_analytic<S>(int, int);                                        \
    template std::vector<SeriesT<S>> analytic_in_central<S>(int, int);

HK_INSTANTIATE_JETS(GaussQ)
HK_INSTANTIATE_JETS(cplx)

}  // namespace hk
