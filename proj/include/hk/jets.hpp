#pragma once

#include <Eigen/Dense>

#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hk/algebra.hpp"
#include "hk/harmonic.hpp"

namespace hk {

// z-exponents, 4 bits per variable. Slots 0..2n-1 are z^{+a} (or z^{1a} in central coordinates),
// slots 2n..4n-1 are z^{-a} (or z^{2a}).
using ZKey = std::uint64_t;

inline int zexp(ZKey k, int slot) { return int((k >> (4 * slot)) & 0xf); }
inline ZKey zkey_add(ZKey a, ZKey b) { return a + b; }  // caller guarantees no nibble overflow
inline ZKey zunit(int slot) { return ZKey(1) << (4 * slot); }
int zdegree(ZKey k, int nvars);

enum class Coords { Analytic, Central };

constexpr int kExactOrder = 1 << 20;
constexpr int kMaxOrder = 15;

struct EquivarianceTag {
    int upper = 0;  // number of upper fundamental indices
    int lower = 0;
    bool scalar() const { return upper == 0 && lower == 0; }
    int components(int n) const;
    friend bool operator==(const EquivarianceTag& a, const EquivarianceTag& b) {
        return a.upper == b.upper && a.lower == b.lower;
    }
};

template <class S>
class SeriesT {
public:
    using HP = HarmonicPolyT<S>;

    SeriesT() = default;
    SeriesT(int n, int order, Coords c = Coords::Analytic, std::optional<int> charge = 0);

    static SeriesT zero(int n, int order, std::optional<int> charge, Coords c = Coords::Analytic) {
        return SeriesT(n, order, c, charge);
    }
    static SeriesT constant(int n, int order, const HP& h, Coords c = Coords::Analytic);
    static SeriesT variable(int n, int order, int slot, Coords c = Coords::Analytic);
    // Single term; charge is computed from the term.
    static SeriesT term(int n, int order, ZKey key, const HP& h, Coords c = Coords::Analytic);

    int n() const { return n_; }
    int order() const { return order_; }
    int nvars() const { return 4 * n_; }
    Coords coords() const { return coords_; }
    std::optional<int> charge() const { return charge_; }
    int valid() const { return valid_; }
    bool exact() const { return valid_ >= kExactOrder; }
    const std::map<ZKey, HP>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int lowest_degree() const;  // INT_MAX/4 for the zero series
    int degree() const;

    HP coeff(ZKey k) const;
    // Charge computed from the terms: nullopt if mixed or empty.
    std::optional<int> computed_charge() const;
    void check_charge() const;

    SeriesT& operator+=(const SeriesT& o);
    SeriesT& operator-=(const SeriesT& o);
    SeriesT operator+(const SeriesT& o) const { SeriesT r = *this; return r += o; }
    SeriesT operator-(const SeriesT& o) const { SeriesT r = *this; return r -= o; }
    SeriesT operator-() const { return scaled(-Field<S>::one()); }
    SeriesT operator*(const SeriesT& o) const;
    SeriesT scaled(const S& s) const;
    SeriesT times(const HP& h) const;  // multiply by a u-polynomial
    void add_term(ZKey k, const HP& h);

    SeriesT with_charge(std::optional<int> c) const;
    SeriesT with_valid(int v) const;
    SeriesT truncated(int deg) const;  // drop terms above deg; valid = min(valid, deg)
    SeriesT with_order(int order) const;
    // Equality of all terms of degree <= deg.
    bool equal_upto(const SeriesT& o, int deg) const;
    bool is_zero_upto(int deg) const;
    // Largest coefficient magnitude among terms of degree <= deg.
    double max_abs_upto(int deg) const;

    cplx eval(const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z) const;
    std::string str() const;

    template <class T>
    SeriesT<T> convert() const {
        SeriesT<T> r(n_, order_, coords_, charge_);
        for (const auto& [k, h] : terms_) r.add_term(k, h.template convert<T>());
        return r.with_valid(valid_);
    }
    SeriesT chopped(double tol) const;

private:
    template <class>
    friend class SeriesT;
    int n_ = 1;
    int order_ = 0;
    Coords coords_ = Coords::Analytic;
    std::optional<int> charge_ = 0;
    int valid_ = kExactOrder;
    std::map<ZKey, HP> terms_;
};

using Series = SeriesT<GaussQ>;
using SeriesF = SeriesT<cplx>;

// sign = +1 for z^{+a}, -1 for z^{-a}; a is 0-based.
template <class S>
SeriesT<S> d_z(int sign, int a, const SeriesT<S>& s);
template <class S>
SeriesT<S> d_slot(int slot, const SeriesT<S>& s);

// Derivation by a flat basis field at B = I. E(A) labels need a tensor context; on a single
// series this only succeeds when the series is declared scalar.
template <class S>
SeriesT<S> apply_flat_field(const Dims& d, int label, const SeriesT<S>& s, const EquivarianceTag& tag = {});

// E(A) acting algebraically on the components of an equivariant tensor (row-major, upper first).
template <class S>
std::vector<SeriesT<S>> apply_E_tensor(const PAlgebra& P, int A, const std::vector<SeriesT<S>>& comps,
                                       const EquivarianceTag& tag);

// f(args): every variable slot of f is replaced by the corresponding argument (nvars entries).
template <class S>
SeriesT<S> compose(const SeriesT<S>& f, const std::vector<SeriesT<S>>& args);

// f must not depend on z^+; args are the 2n replacements for z^{-a}, each of charge +1.
template <class S>
SeriesT<S> substitute(const SeriesT<S>& f, const std::vector<SeriesT<S>>& args);

template <class S>
SeriesT<S> to_central(const SeriesT<S>& s);
template <class S>
SeriesT<S> to_analytic(const SeriesT<S>& s);

// Solves H++ f = g for f of charge k, with f(I2, z) = init(z). Works in central coordinates
// where the u-dependence separates per monomial; the result uses g's coordinates.
template <class S>
SeriesT<S> solve_charged(const SeriesT<S>& g, int k, const SeriesT<S>& init, int max_bound = 64);

// z given in the series' own coordinates.
template <class S>
cplx eval_series(const SeriesT<S>& s, const Eigen::Matrix2cd& U, const Eigen::VectorXcd& z);

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-12;
};

// Finds z with components(U, z) = target by Newton iteration; z and target in the components' coordinates.
template <class S>
Eigen::VectorXcd invert_map_numeric(const std::vector<SeriesT<S>>& components, const Eigen::Matrix2cd& U,
                                    const Eigen::VectorXcd& target, const NewtonOptions& opt = {},
                                    int* iterations = nullptr);

// Linear forms expressing coordinates of one system in terms of the other.
template <class S>
std::vector<SeriesT<S>> central_in_analytic(int n, int order);  // z^{ia} as analytic series
template <class S>
std::vector<SeriesT<S>> analytic_in_central(int n, int order);  // z^{±a} as central series

}  // namespace hk
