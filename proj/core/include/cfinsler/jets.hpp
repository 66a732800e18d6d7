#pragma once

// Forward-mode automatic differentiation by truncated multivariate power
// series over the eight Wirtinger variables (z1, z2, e1, e2 and their
// formal conjugates). Barred variables are independent at differentiation
// time and tied to conjugate numeric seeds at evaluation.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cfinsler/errors.hpp"

namespace cfinsler {

using Complex = std::complex<double>;

inline constexpr int kNumVars = 8;

// Variable layout. The second half is the bar-swap image of the first.
enum Var : int { kZ1 = 0, kZ2 = 1, kE1 = 2, kE2 = 3, kZb1 = 4, kZb2 = 5, kEb1 = 6, kEb2 = 7 };

/// Orders in each of the eight variables; total degree = sum of entries.
struct MultiIndex {
    std::array<std::uint8_t, kNumVars> orders{};

    int degree() const {
        int d = 0;
        for (auto o : orders) d += o;
        return d;
    }
    std::uint32_t pack() const {
        std::uint32_t p = 0;
        for (int v = 0; v < kNumVars; ++v) p |= std::uint32_t(orders[v]) << (4 * v);
        return p;
    }
    bool operator==(const MultiIndex&) const = default;
};

/// Shared per-order lookup tables: the ranked enumeration of multi-indices
/// of total degree <= order, the Cauchy-product pair list, differentiation
/// shift maps and the bar-swap permutation. Built once per order and cached.
class JetTable {
public:
    static const JetTable& get(int order);

    int order;
    std::vector<MultiIndex> indices;          // rank -> multi-index (graded)
    std::vector<int> degree_offset;           // first rank of each degree, plus end
    std::vector<int> conj_rank;               // rank -> rank of bar-swapped index
    std::array<std::vector<int>, kNumVars> shift_up;  // rank of idx+e_v, or -1

    struct MulTriple {
        std::int32_t a, b, c;  // out[c] += x[a] * y[b]
    };
    std::vector<MulTriple> mul_triples;

    int size() const { return static_cast<int>(indices.size()); }
    int rank_of(const MultiIndex& idx) const;  // -1 if degree > order

private:
    explicit JetTable(int order);
};

/// Truncated power series with complex coefficients. Arithmetic is closed
/// under truncation at the storage order; `valid` tracks how many degrees
/// are still exact (differentiation costs one, min over operands otherwise).
class WJet {
public:
    WJet() : order_(0), valid_(0), c_(1, Complex(0.0)) {}
    WJet(int order, Complex constant);

    static WJet variable(int order, Var v, Complex base_value);

    int order() const { return order_; }
    int valid() const { return valid_; }
    Complex value() const { return c_[0]; }

    const std::vector<Complex>& coefficients() const { return c_; }
    Complex coefficient(int rank) const { return c_[rank]; }

    /// Mixed partial derivative value: coefficient times the product of
    /// factorials. Throws OrderBudgetError naming `what` past the budget.
    Complex extract(const MultiIndex& idx, const std::string& what = "extract") const;

    /// Partial derivative jet with respect to one formal variable.
    WJet derivative(Var v, const std::string& what = "derivative") const;

    /// Bar-swap conjugation: coeff(a|b) of the result = conj(coeff(b|a)).
    WJet conjugate() const;

    /// Max |coeff(a|b) - conj(coeff(b|a))| over retained ranks (reality check).
    double reality_defect() const;

    WJet& operator+=(const WJet& o);
    WJet& operator-=(const WJet& o);
    friend WJet operator+(WJet a, const WJet& b) { return a += b; }
    friend WJet operator-(WJet a, const WJet& b) { return a -= b; }
    friend WJet operator-(const WJet& a);
    friend WJet operator*(const WJet& a, const WJet& b);
    friend WJet operator*(const WJet& a, Complex s);
    friend WJet operator*(Complex s, const WJet& a) { return a * s; }
    friend WJet operator*(const WJet& a, double s) { return a * Complex(s); }
    friend WJet operator*(double s, const WJet& a) { return a * Complex(s); }
    friend WJet operator/(const WJet& a, const WJet& b);
    friend WJet operator/(const WJet& a, Complex s) { return a * (Complex(1.0) / s); }
    friend WJet operator+(const WJet& a, Complex s);
    friend WJet operator-(const WJet& a, Complex s) { return a + (-s); }
    friend WJet operator+(Complex s, const WJet& a) { return a + s; }
    friend WJet operator-(Complex s, const WJet& a) { return (-a) + s; }

    friend WJet reciprocal(const WJet& a);
    friend WJet sqrt(const WJet& a);
    friend WJet log(const WJet& a);
    friend WJet exp(const WJet& a);
    friend WJet pow_real(const WJet& a, double p);

    /// Largest coefficient magnitude among retained degrees.
    double max_abs() const;

private:
    friend class JetContextSeeds;
    const JetTable& table() const { return JetTable::get(order_); }
    void truncate_to_valid();
    /// Horner evaluation of sum_k taylor[k] * (a - a0)^k.
    static WJet compose(const WJet& a, const std::vector<Complex>& taylor);

    int order_;
    int valid_;
    std::vector<Complex> c_;
};

/// Evaluation context: truncation order and the base point of T'M.
struct JetContext {
    int order = 6;
    std::array<Complex, 2> z{};
    std::array<Complex, 2> eta{};

    JetContext() = default;
    JetContext(int order, std::array<Complex, 2> z, std::array<Complex, 2> eta);
};

/// The eight coordinate jets seeded at the context's base point.
struct Seeds {
    std::array<WJet, 2> z;
    std::array<WJet, 2> eta;
    std::array<WJet, 2> zbar;
    std::array<WJet, 2> etabar;

    const WJet& var(Var v) const {
        switch (v) {
            case kZ1: return z[0];
            case kZ2: return z[1];
            case kE1: return eta[0];
            case kE2: return eta[1];
            case kZb1: return zbar[0];
            case kZb2: return zbar[1];
            case kEb1: return etabar[0];
            default: return etabar[1];
        }
    }
};

Seeds seed(const JetContext& ctx);

}  // namespace cfinsler
