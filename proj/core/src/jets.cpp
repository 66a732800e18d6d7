#include "cfinsler/jets.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace cfinsler {

namespace {

void enumerate_rec(MultiIndex& idx, int var, int remaining, std::vector<MultiIndex>& out) {
    if (var == kNumVars - 1) {
        idx.orders[var] = std::uint8_t(remaining);
        out.push_back(idx);
        idx.orders[var] = 0;
        return;
    }
    for (int o = 0; o <= remaining; ++o) {
        idx.orders[var] = std::uint8_t(o);
        enumerate_rec(idx, var + 1, remaining - o, out);
    }
    idx.orders[var] = 0;
}

std::unordered_map<std::uint32_t, int>& rank_map(int order);

std::mutex table_mutex;
std::map<int, std::unique_ptr<JetTable>> table_cache;
std::map<int, std::unordered_map<std::uint32_t, int>> rank_map_cache;

std::unordered_map<std::uint32_t, int>& rank_map(int order) {
    return rank_map_cache.at(order);
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

JetTable::JetTable(int ord) : order(ord) {
    // Graded enumeration: all indices of degree d, for d = 0..order.
    degree_offset.resize(order + 2, 0);
    for (int d = 0; d <= order; ++d) {
        degree_offset[d] = static_cast<int>(indices.size());
        std::vector<MultiIndex> of_degree;
        MultiIndex scratch{};
        enumerate_rec(scratch, 0, d, of_degree);
        for (const auto& idx : of_degree)
            if (idx.degree() == d) indices.push_back(idx);
    }
    degree_offset[order + 1] = static_cast<int>(indices.size());

    auto& rmap = rank_map_cache[order];
    rmap.reserve(indices.size() * 2);
    for (int r = 0; r < static_cast<int>(indices.size()); ++r) rmap[indices[r].pack()] = r;

    conj_rank.resize(indices.size());
    for (int r = 0; r < static_cast<int>(indices.size()); ++r) {
        MultiIndex swapped = indices[r];
        for (int v = 0; v < 4; ++v) std::swap(swapped.orders[v], swapped.orders[v + 4]);
        conj_rank[r] = rmap.at(swapped.pack());
    }

    for (int v = 0; v < kNumVars; ++v) {
        shift_up[v].assign(indices.size(), -1);
        for (int r = 0; r < static_cast<int>(indices.size()); ++r) {
            MultiIndex up = indices[r];
            up.orders[v] += 1;
            auto it = rmap.find(up.pack());
            if (it != rmap.end()) shift_up[v][r] = it->second;
        }
    }

    for (int a = 0; a < static_cast<int>(indices.size()); ++a) {
        int da = indices[a].degree();
        for (int b = 0; b < degree_offset[order - da + 1]; ++b) {
            MultiIndex sum = indices[a];
            bool ok = true;
            for (int v = 0; v < kNumVars; ++v) {
                sum.orders[v] += indices[b].orders[v];
                if (sum.orders[v] > 15) ok = false;
            }
            if (!ok) continue;
            mul_triples.push_back({a, b, rmap.at(sum.pack())});
        }
    }
    std::sort(mul_triples.begin(), mul_triples.end(), [](const MulTriple& x, const MulTriple& y) {
        return x.c != y.c ? x.c < y.c : (x.a != y.a ? x.a < y.a : x.b < y.b);
    });
}

const JetTable& JetTable::get(int order) {
    std::lock_guard<std::mutex> lock(table_mutex);
    auto it = table_cache.find(order);
    if (it == table_cache.end())
        it = table_cache.emplace(order, std::unique_ptr<JetTable>(new JetTable(order))).first;
    return *it->second;
}

int JetTable::rank_of(const MultiIndex& idx) const {
    if (idx.degree() > order) return -1;
    std::lock_guard<std::mutex> lock(table_mutex);
    return rank_map(order).at(idx.pack());
}

WJet::WJet(int order, Complex constant) : order_(order), valid_(order) {
    c_.assign(JetTable::get(order).size(), Complex(0.0));
    c_[0] = constant;
}

WJet WJet::variable(int order, Var v, Complex base_value) {
    WJet j(order, base_value);
    MultiIndex idx{};
    idx.orders[v] = 1;
    j.c_[j.table().rank_of(idx)] = Complex(1.0);
    return j;
}

void WJet::truncate_to_valid() {
    const auto& t = table();
    int first_bad = t.degree_offset[std::min(valid_ + 1, order_ + 1)];
    std::fill(c_.begin() + first_bad, c_.end(), Complex(0.0));
}

Complex WJet::extract(const MultiIndex& idx, const std::string& what) const {
    int d = idx.degree();
    if (d > valid_) throw OrderBudgetError(what);
    int r = table().rank_of(idx);
    double scale = 1.0;
    for (int v = 0; v < kNumVars; ++v) scale *= factorial(idx.orders[v]);
    return c_[r] * scale;
}

WJet WJet::derivative(Var v, const std::string& what) const {
    if (valid_ < 1) throw OrderBudgetError(what);
    WJet out(order_, Complex(0.0));
    out.valid_ = valid_ - 1;
    const auto& up = table().shift_up[v];
    const auto& t = table();
    for (int r = 0; r < t.degree_offset[out.valid_ + 1]; ++r) {
        int src = up[r];
        if (src >= 0) out.c_[r] = c_[src] * double(t.indices[r].orders[v] + 1);
    }
    return out;
}

WJet WJet::conjugate() const {
    WJet out(order_, Complex(0.0));
    out.valid_ = valid_;
    const auto& cj = table().conj_rank;
    for (int r = 0; r < static_cast<int>(c_.size()); ++r) out.c_[cj[r]] = std::conj(c_[r]);
    return out;
}

double WJet::reality_defect() const {
    const auto& cj = table().conj_rank;
    const auto& t = table();
    double worst = 0.0;
    for (int r = 0; r < t.degree_offset[valid_ + 1]; ++r)
        worst = std::max(worst, std::abs(c_[r] - std::conj(c_[cj[r]])));
    return worst;
}

WJet& WJet::operator+=(const WJet& o) {
    assert(order_ == o.order_);
    valid_ = std::min(valid_, o.valid_);
    for (std::size_t r = 0; r < c_.size(); ++r) c_[r] += o.c_[r];
    truncate_to_valid();
    return *this;
}

WJet& WJet::operator-=(const WJet& o) {
    assert(order_ == o.order_);
    valid_ = std::min(valid_, o.valid_);
    for (std::size_t r = 0; r < c_.size(); ++r) c_[r] -= o.c_[r];
    truncate_to_valid();
    return *this;
}

WJet operator-(const WJet& a) {
    WJet out = a;
    for (auto& c : out.c_) c = -c;
    return out;
}

WJet operator+(const WJet& a, Complex s) {
    WJet out = a;
    out.c_[0] += s;
    return out;
}

WJet operator*(const WJet& a, Complex s) {
    WJet out = a;
    for (auto& c : out.c_) c *= s;
    return out;
}

WJet operator*(const WJet& a, const WJet& b) {
    assert(a.order_ == b.order_);
    WJet out(a.order_, Complex(0.0));
    out.valid_ = std::min(a.valid_, b.valid_);
    const auto& triples = a.table().mul_triples;
    for (const auto& t : triples) out.c_[t.c] += a.c_[t.a] * b.c_[t.b];
    out.truncate_to_valid();
    return out;
}

WJet WJet::compose(const WJet& a, const std::vector<Complex>& taylor) {
    WJet x = a;
    x.c_[0] = Complex(0.0);
    WJet acc(a.order_, taylor.back());
    acc.valid_ = a.valid_;
    for (int k = static_cast<int>(taylor.size()) - 2; k >= 0; --k) {
        acc = acc * x;
        acc.c_[0] += taylor[k];
        acc.valid_ = a.valid_;  // nilpotency of x keeps all retained degrees exact
    }
    acc.truncate_to_valid();
    return acc;
}

namespace {

// Branch guard shared by sqrt, log and real powers: the constant term must
// lie on the positive real axis up to roundoff.
Complex require_positive_axis(const WJet& a, const char* fn) {
    Complex c0 = a.value();
    if (!(c0.real() > 0.0) || std::abs(c0.imag()) > 1e-9 * (1.0 + std::abs(c0.real())))
        throw BranchViolation(std::string(fn) + ": constant term off the positive real axis");
    return c0;
}

}  // namespace

WJet reciprocal(const WJet& a) {
    Complex c0 = a.value();
    if (std::abs(c0) < 1e-300) throw DomainViolation("division by jet with vanishing constant term");
    std::vector<Complex> taylor(a.valid() + 1);
    Complex t = Complex(1.0) / c0;
    for (int k = 0; k <= a.valid(); ++k) {
        taylor[k] = t;
        t *= -Complex(1.0) / c0;
    }
    return WJet::compose(a, taylor);
}

WJet operator/(const WJet& a, const WJet& b) { return a * reciprocal(b); }

WJet sqrt(const WJet& a) {
    Complex c0 = require_positive_axis(a, "sqrt");
    std::vector<Complex> taylor(a.valid() + 1);
    Complex t = std::sqrt(c0);
    double p = 0.5;
    for (int k = 0; k <= a.valid(); ++k) {
        taylor[k] = t;
        t *= Complex((p - k) / double(k + 1)) / c0;
    }
    return WJet::compose(a, taylor);
}

WJet pow_real(const WJet& a, double p) {
    Complex c0 = require_positive_axis(a, "pow_real");
    std::vector<Complex> taylor(a.valid() + 1);
    Complex t = std::pow(c0, p);
    for (int k = 0; k <= a.valid(); ++k) {
        taylor[k] = t;
        t *= Complex((p - k) / double(k + 1)) / c0;
    }
    return WJet::compose(a, taylor);
}

WJet log(const WJet& a) {
    Complex c0 = require_positive_axis(a, "log");
    std::vector<Complex> taylor(a.valid() + 1);
    taylor[0] = std::log(c0);
    Complex t = Complex(1.0) / c0;
    for (int k = 1; k <= a.valid(); ++k) {
        taylor[k] = t / double(k);
        t *= -Complex(1.0) / c0;
    }
    return WJet::compose(a, taylor);
}

WJet exp(const WJet& a) {
    std::vector<Complex> taylor(a.valid() + 1);
    Complex t = std::exp(a.value());
    for (int k = 0; k <= a.valid(); ++k) {
        taylor[k] = t / factorial(k);
    }
    return WJet::compose(a, taylor);
}

double WJet::max_abs() const {
    double m = 0.0;
    const auto& t = table();
    for (int r = 0; r < t.degree_offset[valid_ + 1]; ++r) m = std::max(m, std::abs(c_[r]));
    return m;
}

JetContext::JetContext(int ord, std::array<Complex, 2> zz, std::array<Complex, 2> ee)
    : order(ord), z(zz), eta(ee) {
    if (order < 2) throw DomainViolation("jet order must be at least 2");
    if (std::abs(eta[0]) == 0.0 && std::abs(eta[1]) == 0.0)
        throw DomainViolation("eta must be nonzero");
}

Seeds seed(const JetContext& ctx) {
    Seeds s{};
    for (int i = 0; i < 2; ++i) {
        s.z[i] = WJet::variable(ctx.order, Var(kZ1 + i), ctx.z[i]);
        s.eta[i] = WJet::variable(ctx.order, Var(kE1 + i), ctx.eta[i]);
        s.zbar[i] = WJet::variable(ctx.order, Var(kZb1 + i), std::conj(ctx.z[i]));
        s.etabar[i] = WJet::variable(ctx.order, Var(kEb1 + i), std::conj(ctx.eta[i]));
    }
    return s;
}

}  // namespace cfinsler
