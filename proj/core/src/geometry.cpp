#include "cfinsler/geometry.hpp"

#include <cmath>

namespace cfinsler {

namespace {

Var z_var(int k) { return static_cast<Var>(kZ1 + k); }
Var e_var(int k) { return static_cast<Var>(kE1 + k); }
Var zb_var(int k) { return static_cast<Var>(kZb1 + k); }
Var eb_var(int k) { return static_cast<Var>(kEb1 + k); }

}  // namespace

FundamentalTensor fundamental_tensor(const WJet& Ljet, const JetContext& ctx) {
    (void)ctx;
    FundamentalTensor ft;
    ft.L = Ljet;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            ft.g[i][j] = Ljet.derivative(e_var(i), "g").derivative(eb_var(j), "g");

    ft.det = ft.g[0][0] * ft.g[1][1] - ft.g[0][1] * ft.g[1][0];
    double scale = std::abs(ft.g[0][0].value()) + std::abs(ft.g[1][1].value());
    if (std::abs(ft.det.value()) < 1e-12 * scale * scale)
        throw DomainViolation("degenerate metric tensor: |det g| below tolerance at base point");

    WJet inv_det = reciprocal(ft.det);
    ft.inv[0][0] = ft.g[1][1] * inv_det;
    ft.inv[0][1] = -ft.g[0][1] * inv_det;
    ft.inv[1][0] = -ft.g[1][0] * inv_det;
    ft.inv[1][1] = ft.g[0][0] * inv_det;

    double defect = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            defect = std::max(defect, std::abs(ft.g[i][j].value() - std::conj(ft.g[j][i].value())));
    ft.hermitian_defect = defect;

    Complex g00 = ft.g[0][0].value();
    Complex d = ft.det.value();
    double tol = 1e-9 * (1.0 + scale * scale);
    ft.positive_definite = g00.real() > 0.0 && d.real() > 0.0 &&
                           std::abs(g00.imag()) <= tol && std::abs(d.imag()) <= tol;
    return ft;
}

WJet adapted_delta(const WJet& X, int k, const Mat2& N, const std::string& what) {
    WJet out = X.derivative(z_var(k), what);
    for (int j = 0; j < 2; ++j) out -= N[j][k] * X.derivative(e_var(j), what);
    return out;
}

WJet adapted_delta_bar(const WJet& X, int k, const Mat2& N, const std::string& what) {
    WJet out = X.derivative(zb_var(k), what);
    for (int j = 0; j < 2; ++j) out -= N[j][k].conjugate() * X.derivative(eb_var(j), what);
    return out;
}

WJet vertical(const WJet& X, int k, const std::string& what) {
    return X.derivative(e_var(k), what);
}

WJet vertical_bar(const WJet& X, int k, const std::string& what) {
    return X.derivative(eb_var(k), what);
}

ChernFinslerConnection chern_finsler(const FundamentalTensor& ft, const JetContext& ctx) {
    Seeds s = seed(ctx);
    ChernFinslerConnection conn;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            WJet acc(ctx.order, 0.0);
            for (int m = 0; m < 2; ++m)
                for (int l = 0; l < 2; ++l)
                    acc += ft.inv[m][i] * ft.g[l][m].derivative(z_var(k), "N") * s.eta[l];
            conn.N[i][k] = acc;
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                WJet accL(ctx.order, 0.0);
                WJet accC(ctx.order, 0.0);
                for (int l = 0; l < 2; ++l) {
                    accL += ft.inv[l][i] * adapted_delta(ft.g[j][l], k, conn.N, "L");
                    accC += ft.inv[l][i] * vertical(ft.g[j][l], k, "C");
                }
                conn.L[i][j][k] = accL;
                conn.C[i][j][k] = accC;
            }
    return conn;
}

JetTensor JetTensor::scalar(const WJet& x) {
    JetTensor t;
    t.comp = {x};
    return t;
}

JetTensor JetTensor::vector(const Vec2& v, TensorSlot slot) {
    JetTensor t;
    t.sig = {slot};
    t.comp = {v[0], v[1]};
    return t;
}

JetTensor JetTensor::matrix(const Mat2& m, TensorSlot row, TensorSlot col) {
    JetTensor t;
    t.sig = {row, col};
    t.comp = {m[0][0], m[1][0], m[0][1], m[1][1]};
    return t;
}

const WJet& JetTensor::at(std::initializer_list<int> idx) const {
    int flat = 0, bit = 1;
    for (int i : idx) {
        flat += i * bit;
        bit *= 2;
    }
    return comp[static_cast<std::size_t>(flat)];
}

namespace {

// Shared body of the four covariant derivatives: `base` differentiates a
// scalar jet, Gamma supplies the connection block, and `barred` selects
// which slots pick up connection terms.
template <typename Base>
JetTensor covariant_impl(const JetTensor& X, int k, const Ten3& Gamma, bool barred, Base base) {
    if (X.sig.size() > 6) throw std::runtime_error("unknown tensor signature: rank too large");
    JetTensor out;
    out.sig = X.sig;
    out.comp.resize(X.comp.size());
    int rank = static_cast<int>(X.sig.size());
    for (std::size_t flat = 0; flat < X.comp.size(); ++flat) {
        WJet acc = base(X.comp[flat]);
        for (int s = 0; s < rank; ++s) {
            if (X.sig[s].barred != barred) continue;
            int i_s = (static_cast<int>(flat) >> s) & 1;
            for (int l = 0; l < 2; ++l) {
                std::size_t other = (flat & ~(std::size_t(1) << s)) | (std::size_t(l) << s);
                WJet G = barred ? Gamma[X.sig[s].up ? i_s : l][X.sig[s].up ? l : i_s][k].conjugate()
                                : Gamma[X.sig[s].up ? i_s : l][X.sig[s].up ? l : i_s][k];
                if (X.sig[s].up)
                    acc += X.comp[other] * G;
                else
                    acc -= X.comp[other] * G;
            }
        }
        out.comp[flat] = acc;
    }
    return out;
}

}  // namespace

JetTensor covariant_h(const JetTensor& X, int k, const ChernFinslerConnection& conn) {
    return covariant_impl(X, k, conn.L, false,
                          [&](const WJet& x) { return adapted_delta(x, k, conn.N, "covariant_h"); });
}

JetTensor covariant_hbar(const JetTensor& X, int k, const ChernFinslerConnection& conn) {
    return covariant_impl(X, k, conn.L, true, [&](const WJet& x) {
        return adapted_delta_bar(x, k, conn.N, "covariant_hbar");
    });
}

JetTensor covariant_v(const JetTensor& X, int k, const ChernFinslerConnection& conn) {
    return covariant_impl(X, k, conn.C, false,
                          [&](const WJet& x) { return vertical(x, k, "covariant_v"); });
}

JetTensor covariant_vbar(const JetTensor& X, int k, const ChernFinslerConnection& conn) {
    return covariant_impl(X, k, conn.C, true,
                          [&](const WJet& x) { return vertical_bar(x, k, "covariant_vbar"); });
}

SprayData spray_and_canonical(const ChernFinslerConnection& conn, const JetContext& ctx) {
    Seeds s = seed(ctx);
    SprayData sp;
    for (int i = 0; i < 2; ++i) {
        WJet acc(ctx.order, 0.0);
        for (int j = 0; j < 2; ++j) acc += conn.N[i][j] * s.eta[j];
        sp.G[i] = acc * 0.5;
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            sp.Nc[i][j] = vertical(sp.G[i], j, "Nc");
            sp.Gbar[i][j] = vertical_bar(sp.G[i], j, "dGbar");
        }
    return sp;
}

BerwaldRundConnections berwald_rund(const FundamentalTensor& ft, const SprayData& spray,
                                    const JetContext& ctx) {
    (void)ctx;
    BerwaldRundConnections br;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                br.BL[i][j][k] = vertical(spray.Nc[i][j], k, "BL");
                br.BLbar[i][j][k] = vertical_bar(spray.Nc[i][j], k, "BLbar");
            }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                WJet accR(ft.L.order(), 0.0);
                WJet accRb(ft.L.order(), 0.0);
                for (int l = 0; l < 2; ++l) {
                    accR += ft.inv[l][i] * (adapted_delta(ft.g[j][l], k, spray.Nc, "RL") +
                                            adapted_delta(ft.g[k][l], j, spray.Nc, "RL"));
                    accRb += ft.inv[l][i] * (adapted_delta_bar(ft.g[j][l], k, spray.Nc, "RLbar") -
                                             adapted_delta_bar(ft.g[j][k], l, spray.Nc, "RLbar"));
                }
                br.RL[i][j][k] = accR * 0.5;
                br.RLbar[i][j][k] = accRb * 0.5;
            }
    return br;
}

TorsionData torsion_T(const FundamentalTensor& ft, const ChernFinslerConnection& conn,
                      const JetContext& ctx) {
    Seeds s = seed(ctx);
    TorsionData td;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                td.T[i][j][k] = conn.L[i][j][k] - conn.L[i][k][j];
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            WJet acc(ctx.order, 0.0);
            for (int j = 0; j < 2; ++j) acc += td.T[i][j][k] * s.eta[j];
            td.T_eta[i][k] = acc;
        }
    for (int k = 0; k < 2; ++k) {
        WJet acc(ctx.order, 0.0);
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l) acc += ft.g[i][l] * td.T_eta[i][k] * s.etabar[l];
        td.T_low[k] = acc;
    }
    return td;
}

GeometryData compute_geometry(const MetricSpec& spec, const JetContext& ctx) {
    GeometryData gd;
    gd.ctx = ctx;
    gd.seeds = seed(ctx);
    WJet Ljet = eval_L_jet(spec, ctx);
    gd.ft = fundamental_tensor(Ljet, ctx);
    gd.conn = chern_finsler(gd.ft, ctx);
    gd.spray = spray_and_canonical(gd.conn, ctx);
    gd.br = berwald_rund(gd.ft, gd.spray, ctx);
    gd.torsion = torsion_T(gd.ft, gd.conn, ctx);
    return gd;
}

}  // namespace cfinsler
