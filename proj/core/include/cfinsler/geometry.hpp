#pragma once

// Fundamental tensor, Chern-Finsler connection, spray, Berwald and Rund
// connections and the torsion layers, all as jet-valued tensors on a
// 2-dimensional complex Finsler manifold.

#include <array>
#include <string>
#include <vector>

#include "cfinsler/jets.hpp"
#include "cfinsler/metrics.hpp"

namespace cfinsler {

using Vec2 = std::array<WJet, 2>;
using Mat2 = std::array<std::array<WJet, 2>, 2>;
using Ten3 = std::array<std::array<std::array<WJet, 2>, 2>, 2>;

/// g_{ij\bar} and its closed-form inverse. Convention: g[i][j] stores
/// g_{i j̄}; the raised tensor g^{j̄ i} is inv[j][i], so that
/// sum_j g[i][j] * inv[j][k] = delta_i^k.
struct FundamentalTensor {
    WJet L;      // the metric function jet
    Mat2 g;      // g_{i j̄}
    Mat2 inv;    // plain matrix inverse of g; g^{j̄ i} = inv[j][i]
    WJet det;    // det g
    bool positive_definite = false;
    double hermitian_defect = 0.0;  // max |g_{ij̄} - conj(g_{jī})| at the base point
};

struct ChernFinslerConnection {
    Mat2 N;   // N[i][k] = N^i_k
    Ten3 L;   // L[i][j][k] = L^i_{jk}
    Ten3 C;   // C[i][j][k] = C^i_{jk}
};

struct SprayData {
    Vec2 G;       // G^i = (1/2) N^i_j eta^j
    Mat2 Nc;      // canonical nonlinear connection Nc^i_j = d. _j G^i
    Mat2 Gbar;    // d._kbar G^i ; zero iff the spray is holomorphic in eta
};

struct BerwaldRundConnections {
    Ten3 BL;      // B-L^i_{jk} = d._k Nc^i_j
    Ten3 BLbar;   // B-L^i_{j kbar} = d._kbar Nc^i_j
    Ten3 RL;      // c-L^i_{jk}, Rund type
    Ten3 RLbar;   // c-L^i_{j kbar}, implemented literally; low confidence
};

struct TorsionData {
    Ten3 T;       // T^i_{jk} = L^i_{jk} - L^i_{kj}
    Mat2 T_eta;   // T^i_{jk} eta^j
    Vec2 T_low;   // g_{i lbar} T^i_{jk} eta^j etabar^l, indexed by k
};

FundamentalTensor fundamental_tensor(const WJet& Ljet, const JetContext& ctx);

ChernFinslerConnection chern_finsler(const FundamentalTensor& ft, const JetContext& ctx);

/// Adapted-frame derivatives. delta_k X = dz_k X - N^j_k d._j X and the
/// barred analogue with the conjugated connection.
WJet adapted_delta(const WJet& X, int k, const Mat2& N, const std::string& what = "delta");
WJet adapted_delta_bar(const WJet& X, int k, const Mat2& N, const std::string& what = "delta_bar");

/// Vertical derivatives d./de^k and d./debar^k of a scalar jet.
WJet vertical(const WJet& X, int k, const std::string& what = "vertical");
WJet vertical_bar(const WJet& X, int k, const std::string& what = "vertical_bar");

/// A tensor slot: contravariant or covariant, barred or unbarred.
struct TensorSlot {
    bool up = false;
    bool barred = false;
};

/// Small dense jet tensor over index set {0,1}^rank. Component order is
/// little-endian in the slot list: comp[i0 + 2*i1 + 4*i2 + ...].
struct JetTensor {
    std::vector<TensorSlot> sig;
    std::vector<WJet> comp;

    static JetTensor scalar(const WJet& x);
    static JetTensor vector(const Vec2& v, TensorSlot slot);
    static JetTensor matrix(const Mat2& m, TensorSlot row, TensorSlot col);
    const WJet& at(std::initializer_list<int> idx) const;
};

/// Horizontal covariant derivative X..._{|k} (unbarred k): delta_k plus
/// the Chern-Finsler connection terms of each slot. Barred slots receive
/// no term under an unbarred derivative and vice versa.
JetTensor covariant_h(const JetTensor& X, int k, const ChernFinslerConnection& conn);
JetTensor covariant_hbar(const JetTensor& X, int k, const ChernFinslerConnection& conn);
JetTensor covariant_v(const JetTensor& X, int k, const ChernFinslerConnection& conn);
JetTensor covariant_vbar(const JetTensor& X, int k, const ChernFinslerConnection& conn);

SprayData spray_and_canonical(const ChernFinslerConnection& conn, const JetContext& ctx);

BerwaldRundConnections berwald_rund(const FundamentalTensor& ft, const SprayData& spray,
                                    const JetContext& ctx);

TorsionData torsion_T(const FundamentalTensor& ft, const ChernFinslerConnection& conn,
                      const JetContext& ctx);

/// Shared per-point pipeline output, computed once and reused downstream.
struct GeometryData {
    JetContext ctx;
    Seeds seeds;
    FundamentalTensor ft;
    ChernFinslerConnection conn;
    SprayData spray;
    BerwaldRundConnections br;
    TorsionData torsion;
};

GeometryData compute_geometry(const MetricSpec& spec, const JetContext& ctx);

}  // namespace cfinsler
