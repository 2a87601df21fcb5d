#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hk/errors.hpp"
#include "hk/scalar.hpp"

namespace hk {

// Exponents (alpha, beta, gamma, delta) of (u1+)^a (u2+)^b (u1-)^c (u2-)^d packed one byte each.
using UKey = std::uint32_t;

inline UKey ukey(int a, int b, int c, int d) {
    return UKey(a) | (UKey(b) << 8) | (UKey(c) << 16) | (UKey(d) << 24);
}
inline std::array<int, 4> uexp(UKey k) {
    return {int(k & 0xff), int((k >> 8) & 0xff), int((k >> 16) & 0xff), int((k >> 24) & 0xff)};
}
inline int ucharge(UKey k) {
    auto e = uexp(k);
    return e[0] + e[1] - e[2] - e[3];
}
inline int udegree(UKey k) {
    auto e = uexp(k);
    return e[0] + e[1] + e[2] + e[3];
}

// Polynomial on Sp1(C) kept in the normal form where u1+ and u2- never both appear.
template <class S>
class HarmonicPolyT {
public:
    using Term = std::pair<UKey, S>;

    HarmonicPolyT() = default;
    static HarmonicPolyT constant(const S& c);
    static HarmonicPolyT monomial(int a, int b, int c, int d, const S& coeff);
    // Any exponents; the result is reduced.
    static HarmonicPolyT reduce(const std::vector<Term>& raw);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    int degree() const;
    // Charge if homogeneous (zero polynomial reports nullopt).
    std::optional<int> charge() const;
    std::set<int> charges() const;
    S coeff(UKey k) const;
    S value_at_identity() const;

    HarmonicPolyT& operator+=(const HarmonicPolyT& o);
    HarmonicPolyT& operator-=(const HarmonicPolyT& o);
    HarmonicPolyT operator+(const HarmonicPolyT& o) const { HarmonicPolyT r = *this; return r += o; }
    HarmonicPolyT operator-(const HarmonicPolyT& o) const { HarmonicPolyT r = *this; return r -= o; }
    HarmonicPolyT operator-() const { return scaled(-Field<S>::one()); }
    HarmonicPolyT operator*(const HarmonicPolyT& o) const;
    HarmonicPolyT scaled(const S& s) const;
    // a*this + b*o style accumulate without temporaries.
    void add_scaled(const HarmonicPolyT& o, const S& s);
    friend bool operator==(const HarmonicPolyT& a, const HarmonicPolyT& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const HarmonicPolyT& a, const HarmonicPolyT& b) { return !(a == b); }

    cplx eval(const Eigen::Matrix2cd& U) const;
    std::string str() const;

    template <class T>
    HarmonicPolyT<T> convert() const {
        std::vector<typename HarmonicPolyT<T>::Term> t;
        t.reserve(terms_.size());
        for (const auto& [k, c] : terms_) t.emplace_back(k, convert_from(c, (T*)nullptr));
        return HarmonicPolyT<T>::from_sorted(std::move(t));
    }
    static HarmonicPolyT from_sorted(std::vector<Term> t);
    // Drops coefficients with magnitude below tol (float backend only).
    HarmonicPolyT chopped(double tol) const;

private:
    template <class T>
    static T convert_from(const S& c, T*) {
        if constexpr (std::is_same_v<S, T>) return c;
        else if constexpr (std::is_same_v<T, cplx>) return Field<S>::to_complex(c);
        else static_assert(std::is_same_v<S, T>, "only exact -> float conversion is supported");
    }
    std::vector<Term> terms_;
};

using HarmonicPoly = HarmonicPolyT<GaussQ>;
using HarmonicPolyF = HarmonicPolyT<cplx>;

template <class S> HarmonicPolyT<S> d_H0(const HarmonicPolyT<S>& h);
template <class S> HarmonicPolyT<S> d_Hpp(const HarmonicPolyT<S>& h);
template <class S> HarmonicPolyT<S> d_Hmm(const HarmonicPolyT<S>& h);

template <class S>
struct RaisingSolution {
    HarmonicPolyT<S> particular;
    std::vector<HarmonicPolyT<S>> kernel;
};

// Solves d_Hpp(f) = g for f of charge k. The working space is normal-form monomials of degree
// at most `bound` (defaults to the smallest admissible bound covering g).
template <class S>
RaisingSolution<S> solve_raising(const HarmonicPolyT<S>& g, int k, int bound = -1, int max_bound = 64);

// Same, then fixes the kernel part by the value at U = I2 (only the (u1+)^k kernel direction is
// visible there). Throws Underdetermined when kernel directions survive.
template <class S>
HarmonicPolyT<S> solve_raising_pinned(const HarmonicPolyT<S>& g, int k, const S& value_at_I2, int max_bound = 64);

cplx eval_at(const HarmonicPoly& h, const Eigen::Matrix2cd& U);

// Image under U -> (U^T)^{-1}, i.e. u1+ -> u2-, u2+ -> -u1-, u1- -> -u2+, u2- -> u1+.
template <class S>
HarmonicPolyT<S> psi_transform(const HarmonicPolyT<S>& h);
bool check_psi_symmetry(const HarmonicPoly& h);

// All normal-form monomials of a given charge and degree <= bound.
std::vector<UKey> normal_monomials(int charge, int bound);

}  // namespace hk
