#include "hk/harmonic.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace hk {

namespace {

// Binomial coefficients as longs; exponents stay far below overflow range.
long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <class S>
void accumulate_reduced(std::unordered_map<UKey, S>& acc, int a, int b, int c, int d, const S& coeff) {
    if (a > 0 && d > 0) {
        int m = std::min(a, d);
        a -= m;
        d -= m;
        for (int j = 0; j <= m; ++j) {
            S t = coeff * Field<S>::from_int(binom(m, j));
            auto it = acc.find(ukey(a, b + j, c + j, d));
            if (it == acc.end()) acc.emplace(ukey(a, b + j, c + j, d), std::move(t));
            else it->second += t;
        }
        return;
    }
    auto it = acc.find(ukey(a, b, c, d));
    if (it == acc.end()) acc.emplace(ukey(a, b, c, d), coeff);
    else it->second += coeff;
}

template <class S>
std::vector<std::pair<UKey, S>> drain(std::unordered_map<UKey, S>& acc) {
    std::vector<std::pair<UKey, S>> t;
    t.reserve(acc.size());
    for (auto& kv : acc)
        if (!Field<S>::is_zero(kv.second)) t.emplace_back(kv.first, std::move(kv.second));
    std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return t;
}

}  // namespace

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::from_sorted(std::vector<Term> t) {
    HarmonicPolyT h;
    h.terms_ = std::move(t);
    h.terms_.erase(std::remove_if(h.terms_.begin(), h.terms_.end(),
                                  [](const Term& x) { return Field<S>::is_zero(x.second); }),
                   h.terms_.end());
    return h;
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::constant(const S& c) {
    return monomial(0, 0, 0, 0, c);
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::monomial(int a, int b, int c, int d, const S& coeff) {
    return reduce({{ukey(a, b, c, d), coeff}});
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::reduce(const std::vector<Term>& raw) {
    std::unordered_map<UKey, S> acc;
    for (const auto& [k, c] : raw) {
        if (Field<S>::is_zero(c)) continue;
        auto e = uexp(k);
        accumulate_reduced(acc, e[0], e[1], e[2], e[3], c);
    }
    HarmonicPolyT h;
    h.terms_ = drain(acc);
    return h;
}

template <class S>
int HarmonicPolyT<S>::degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, udegree(t.first));
    return d;
}

template <class S>
std::optional<int> HarmonicPolyT<S>::charge() const {
    if (terms_.empty()) return std::nullopt;
    int c = ucharge(terms_.front().first);
    for (const auto& t : terms_)
        if (ucharge(t.first) != c) return std::nullopt;
    return c;
}

template <class S>
std::set<int> HarmonicPolyT<S>::charges() const {
    std::set<int> r;
    for (const auto& t : terms_) r.insert(ucharge(t.first));
    return r;
}

template <class S>
S HarmonicPolyT<S>::coeff(UKey k) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, UKey key) { return t.first < key; });
    if (it != terms_.end() && it->first == k) return it->second;
    return Field<S>::zero();
}

template <class S>
S HarmonicPolyT<S>::value_at_identity() const {
    S v = Field<S>::zero();
    for (const auto& [k, c] : terms_) {
        auto e = uexp(k);
        if (e[1] == 0 && e[2] == 0) v += c;
    }
    return v;
}

template <class S>
void HarmonicPolyT<S>::add_scaled(const HarmonicPolyT& o, const S& s) {
    if (o.terms_.empty() || Field<S>::is_zero(s)) return;
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto i = terms_.begin();
    auto j = o.terms_.begin();
    while (i != terms_.end() || j != o.terms_.end()) {
        if (j == o.terms_.end() || (i != terms_.end() && i->first < j->first)) {
            out.push_back(std::move(*i++));
        } else if (i == terms_.end() || j->first < i->first) {
            out.emplace_back(j->first, j->second * s);
            ++j;
        } else {
            S v = std::move(i->second);
            v += j->second * s;
            if (!Field<S>::is_zero(v)) out.emplace_back(i->first, std::move(v));
            ++i;
            ++j;
        }
    }
    terms_ = std::move(out);
}

template <class S>
HarmonicPolyT<S>& HarmonicPolyT<S>::operator+=(const HarmonicPolyT& o) {
    add_scaled(o, Field<S>::one());
    return *this;
}

template <class S>
HarmonicPolyT<S>& HarmonicPolyT<S>::operator-=(const HarmonicPolyT& o) {
    add_scaled(o, -Field<S>::one());
    return *this;
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::operator*(const HarmonicPolyT& o) const {
    if (terms_.empty() || o.terms_.empty()) return {};
    if (o.terms_.size() == 1 && o.terms_[0].first == 0) return scaled(o.terms_[0].second);
    if (terms_.size() == 1 && terms_[0].first == 0) return o.scaled(terms_[0].second);
    std::unordered_map<UKey, S> acc;
    acc.reserve(terms_.size() * o.terms_.size());
    for (const auto& [ka, ca] : terms_) {
        auto ea = uexp(ka);
        for (const auto& [kb, cb] : o.terms_) {
            auto eb = uexp(kb);
            accumulate_reduced(acc, ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3], ca * cb);
        }
    }
    HarmonicPolyT h;
    h.terms_ = drain(acc);
    return h;
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::scaled(const S& s) const {
    if (Field<S>::is_zero(s)) return {};
    HarmonicPolyT h = *this;
    for (auto& t : h.terms_) t.second *= s;
    return h;
}

template <class S>
HarmonicPolyT<S> HarmonicPolyT<S>::chopped(double tol) const {
    HarmonicPolyT h;
    for (const auto& t : terms_)
        if (!Field<S>::negligible(t.second, tol)) h.terms_.push_back(t);
    return h;
}

template <class S>
cplx HarmonicPolyT<S>::eval(const Eigen::Matrix2cd& U) const {
    const cplx u[4] = {U(0, 0), U(1, 0), U(0, 1), U(1, 1)};
    cplx acc = 0.0;
    for (const auto& [k, c] : terms_) {
        auto e = uexp(k);
        cplx m = Field<S>::to_complex(c);
        for (int i = 0; i < 4; ++i)
            for (int p = 0; p < e[i]; ++p) m *= u[i];
        acc += m;
    }
    return acc;
}

template <class S>
std::string HarmonicPolyT<S>::str() const {
    if (terms_.empty()) return "0";
    static const char* names[4] = {"u1+", "u2+", "u1-", "u2-"};
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << scalar_str(c);
        auto e = uexp(k);
        for (int i = 0; i < 4; ++i) {
            if (e[i] == 0) continue;
            os << "*" << names[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

template <class S>
HarmonicPolyT<S> d_H0(const HarmonicPolyT<S>& h) {
    std::vector<typename HarmonicPolyT<S>::Term> t;
    for (const auto& [k, c] : h.terms()) {
        int q = ucharge(k);
        if (q != 0) t.emplace_back(k, c * Field<S>::from_int(q));
    }
    return HarmonicPolyT<S>::from_sorted(std::move(t));
}

template <class S>
HarmonicPolyT<S> d_Hpp(const HarmonicPolyT<S>& h) {
    // u^i_+ d/du^i_-
    std::unordered_map<UKey, S> acc;
    for (const auto& [k, c] : h.terms()) {
        auto e = uexp(k);
        if (e[2] > 0) accumulate_reduced(acc, e[0] + 1, e[1], e[2] - 1, e[3], c * Field<S>::from_int(e[2]));
        if (e[3] > 0) accumulate_reduced(acc, e[0], e[1] + 1, e[2], e[3] - 1, c * Field<S>::from_int(e[3]));
    }
    return HarmonicPolyT<S>::from_sorted(drain(acc));
}

template <class S>
HarmonicPolyT<S> d_Hmm(const HarmonicPolyT<S>& h) {
    // u^i_- d/du^i_+
    std::unordered_map<UKey, S> acc;
    for (const auto& [k, c] : h.terms()) {
        auto e = uexp(k);
        if (e[0] > 0) accumulate_reduced(acc, e[0] - 1, e[1], e[2] + 1, e[3], c * Field<S>::from_int(e[0]));
        if (e[1] > 0) accumulate_reduced(acc, e[0], e[1] - 1, e[2], e[3] + 1, c * Field<S>::from_int(e[1]));
    }
    return HarmonicPolyT<S>::from_sorted(drain(acc));
}

std::vector<UKey> normal_monomials(int charge, int bound) {
    std::vector<UKey> r;
    for (int a = 0; a <= bound; ++a)
        for (int b = 0; a + b <= bound; ++b)
            for (int c = 0; a + b + c <= bound; ++c) {
                int d = a + b - c - charge;
                if (d < 0 || a + b + c + d > bound) continue;
                if (a > 0 && d > 0) continue;
                r.push_back(ukey(a, b, c, d));
            }
    std::sort(r.begin(), r.end());
    return r;
}

namespace {

// Left weight (index 1 count minus index 2 count); d_Hpp and reduce both preserve it.
int left_weight(UKey k) {
    auto e = uexp(k);
    return e[0] + e[2] - e[1] - e[3];
}

// Elimination of one weight block of d_Hpp, recorded so that any right side can be solved by
// a matrix-vector product: E rhs puts the system in reduced row echelon form.
template <class S>
struct BlockOp {
    std::vector<UKey> dkeys, ckeys;
    std::vector<std::vector<S>> E;
    std::vector<int> pivcol;
};

template <class S>
struct RaisingOp {
    std::vector<BlockOp<S>> blocks;
    std::unordered_map<UKey, std::pair<int, int>> where;  // codomain key -> (block, row); block -1 means no domain
    std::vector<HarmonicPolyT<S>> kernel;
};

template <class S>
BlockOp<S> eliminate(const std::vector<UKey>& dkeys, const std::vector<UKey>& ckeys,
                     std::vector<HarmonicPolyT<S>>& kernel) {
    const int nrows = int(ckeys.size()), ncols = int(dkeys.size());
    std::map<UKey, int> row;
    for (int i = 0; i < nrows; ++i) row[ckeys[i]] = i;
    std::vector<std::vector<S>> M(nrows, std::vector<S>(ncols, Field<S>::zero()));
    for (int j = 0; j < ncols; ++j) {
        auto img = d_Hpp(HarmonicPolyT<S>::from_sorted({{dkeys[j], Field<S>::one()}}));
        for (const auto& [key, c] : img.terms()) {
            auto it = row.find(key);
            if (it == row.end()) throw Error(ErrorKind::DegreeOverflow, "image leaves the bounded space");
            M[it->second][j] = c;
        }
    }
    BlockOp<S> op{dkeys, ckeys, {}, {}};
    auto& E = op.E;
    E.assign(nrows, std::vector<S>(nrows, Field<S>::zero()));
    for (int i = 0; i < nrows; ++i) E[i][i] = Field<S>::one();
    int r = 0;
    for (int c = 0; c < ncols && r < nrows; ++c) {
        int piv = -1;
        double best = 0.0;
        for (int i = r; i < nrows; ++i) {
            if (Field<S>::is_zero(M[i][c])) continue;
            double mag = Field<S>::magnitude(M[i][c]);
            if (mag > best) {
                best = mag;
                piv = i;
                if (Field<S>::exact) break;
            }
        }
        if (piv < 0 || Field<S>::negligible(M[piv][c], 1e-12)) continue;
        std::swap(M[piv], M[r]);
        std::swap(E[piv], E[r]);
        S p = M[r][c];
        for (int j = c; j < ncols; ++j) M[r][j] /= p;
        for (auto& x : E[r]) x /= p;
        for (int i = 0; i < nrows; ++i) {
            if (i == r || Field<S>::is_zero(M[i][c])) continue;
            S f = M[i][c];
            for (int j = c; j < ncols; ++j) M[i][j] -= f * M[r][j];
            for (int j = 0; j < nrows; ++j)
                if (!Field<S>::is_zero(E[r][j])) E[i][j] -= f * E[r][j];
        }
        op.pivcol.push_back(c);
        ++r;
    }
    std::vector<bool> is_piv(ncols, false);
    for (int c : op.pivcol) is_piv[c] = true;
    for (int f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        std::vector<S> v(ncols, Field<S>::zero());
        v[f] = Field<S>::one();
        for (int i = 0; i < r; ++i) v[op.pivcol[i]] = -M[i][f];
        std::vector<typename HarmonicPolyT<S>::Term> t;
        for (int j = 0; j < ncols; ++j)
            if (!Field<S>::is_zero(v[j])) t.emplace_back(dkeys[j], v[j]);
        std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        kernel.push_back(HarmonicPolyT<S>::from_sorted(std::move(t)));
    }
    return op;
}

template <class S>
std::shared_ptr<const RaisingOp<S>> raising_op(int k, int bound) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const RaisingOp<S>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({k, bound});
    if (it != cache.end()) return it->second;
    auto op = std::make_shared<RaisingOp<S>>();
    std::map<int, std::vector<UKey>> dom_w, cod_w;
    for (UKey m : normal_monomials(k, bound)) dom_w[left_weight(m)].push_back(m);
    for (UKey m : normal_monomials(k + 2, bound)) cod_w[left_weight(m)].push_back(m);
    for (auto& [w, dkeys] : dom_w) {
        op->blocks.push_back(eliminate<S>(dkeys, cod_w[w], op->kernel));
        const int b = int(op->blocks.size()) - 1;
        const auto& ck = op->blocks.back().ckeys;
        for (int i = 0; i < int(ck.size()); ++i) op->where[ck[i]] = {b, i};
    }
    for (auto& [w, ckeys] : cod_w)
        if (!dom_w.count(w))
            for (UKey key : ckeys) op->where[key] = {-1, 0};
    cache[{k, bound}] = op;
    return op;
}

}  // namespace

template <class S>
RaisingSolution<S> solve_raising(const HarmonicPolyT<S>& g, int k, int bound, int max_bound) {
    for (const auto& t : g.terms())
        if (ucharge(t.first) != k + 2)
            throw Error(ErrorKind::ChargeMismatch, "source charge " + std::to_string(ucharge(t.first)) +
                                                       " but raising from charge " + std::to_string(k));
    if (bound < 0) {
        bound = std::max(g.degree(), std::abs(k));
        if ((bound - k) % 2 != 0) ++bound;
    }
    if (bound > max_bound || g.degree() > bound)
        throw Error(ErrorKind::DegreeOverflow, "degree bound " + std::to_string(bound) + " exceeded");
    auto op = raising_op<S>(k, bound);

    // Scatter the source into its blocks.
    std::map<int, std::vector<std::pair<int, S>>> rhs;
    for (const auto& [key, c] : g.terms()) {
        auto it = op->where.find(key);
        if (it == op->where.end() || it->second.first < 0)
            throw Error(ErrorKind::Inconsistent, "source is not in the image of H++");
        rhs[it->second.first].emplace_back(it->second.second, c);
    }
    RaisingSolution<S> sol;
    sol.kernel = op->kernel;
    std::vector<typename HarmonicPolyT<S>::Term> part;
    for (const auto& [b, entries] : rhs) {
        const BlockOp<S>& blk = op->blocks[b];
        const int nrows = int(blk.ckeys.size()), r = int(blk.pivcol.size());
        for (int i = 0; i < nrows; ++i) {
            S y = Field<S>::zero();
            for (const auto& [j, c] : entries)
                if (!Field<S>::is_zero(blk.E[i][j])) y += blk.E[i][j] * c;
            if (i >= r) {
                if (!Field<S>::negligible(y, 1e-10))
                    throw Error(ErrorKind::Inconsistent, "source is not in the image of H++ at charge " + std::to_string(k));
            } else if (!Field<S>::is_zero(y)) {
                part.emplace_back(blk.dkeys[blk.pivcol[i]], y);
            }
        }
    }
    std::sort(part.begin(), part.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    sol.particular = HarmonicPolyT<S>::from_sorted(std::move(part));
    return sol;
}

template <class S>
HarmonicPolyT<S> solve_raising_pinned(const HarmonicPolyT<S>& g, int k, const S& value_at_I2, int max_bound) {
    if (g.is_zero() && k < 0) {
        if (!Field<S>::negligible(value_at_I2, 1e-12))
            throw Error(ErrorKind::Inconsistent, "nonzero slice value for a charge without kernel");
        return {};
    }
    int bound = std::max(g.degree(), std::abs(k));
    if ((bound - k) % 2 != 0) ++bound;
    auto sol = solve_raising(g, k, bound, max_bound);
    HarmonicPolyT<S> f = sol.particular;
    S miss = value_at_I2 - f.value_at_identity();
    // Kernel vectors are (u1+)^m (u2+)^(k-m) up to normalization; only the m = k one is seen at I2.
    std::vector<HarmonicPolyT<S>> visible, hidden;
    for (auto& kv : sol.kernel) {
        if (Field<S>::is_zero(kv.value_at_identity())) hidden.push_back(kv);
        else visible.push_back(kv);
    }
    if (!hidden.empty() || visible.size() > 1)
        throw Error(ErrorKind::Underdetermined, "kernel of dimension " + std::to_string(sol.kernel.size()) +
                                                    " is not fixed by the slice at U = I2");
    if (visible.empty()) {
        if (!Field<S>::negligible(miss, 1e-10))
            throw Error(ErrorKind::Inconsistent, "slice value cannot be matched");
        return f;
    }
    f.add_scaled(visible[0], miss / visible[0].value_at_identity());
    return f;
}

cplx eval_at(const HarmonicPoly& h, const Eigen::Matrix2cd& U) {
    if (std::abs(U.determinant() - 1.0) > 1e-10)
        throw Error(ErrorKind::BadDimensions, "eval_at needs det U = 1");
    return h.eval(U);
}

template <class S>
HarmonicPolyT<S> psi_transform(const HarmonicPolyT<S>& h) {
    // u1+ -> u2-, u2+ -> -u1-, u1- -> -u2+, u2- -> u1+
    std::vector<typename HarmonicPolyT<S>::Term> raw;
    for (const auto& [k, c] : h.terms()) {
        auto e = uexp(k);
        S s = c;
        if ((e[1] + e[2]) % 2 != 0) s = -s;
        raw.emplace_back(ukey(e[3], e[2], e[1], e[0]), s);
    }
    return HarmonicPolyT<S>::reduce(raw);
}

bool check_psi_symmetry(const HarmonicPoly& h) { return psi_transform(h) == h; }

template class HarmonicPolyT<GaussQ>;
template class HarmonicPolyT<cplx>;
template HarmonicPoly d_H0(const HarmonicPoly&);
template HarmonicPolyF d_H0(const HarmonicPolyF&);
template HarmonicPoly d_Hpp(const HarmonicPoly&);
template HarmonicPolyF d_Hpp(const HarmonicPolyF&);
template HarmonicPoly d_Hmm(const HarmonicPoly&);
template HarmonicPolyF d_Hmm(const HarmonicPolyF&);
template RaisingSolution<GaussQ> solve_raising(const HarmonicPoly&, int, int, int);
template RaisingSolution<cplx> solve_raising(const HarmonicPolyF&, int, int, int);
template HarmonicPoly solve_raising_pinned(const HarmonicPoly&, int, const GaussQ&, int);
template HarmonicPolyF solve_raising_pinned(const HarmonicPolyF&, int, const cplx&, int);
template HarmonicPoly psi_transform(const HarmonicPoly&);
template HarmonicPolyF psi_transform(const HarmonicPolyF&);

}  // namespace hk
