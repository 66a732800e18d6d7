#include "cfinsler/frame.hpp"

#include <cmath>

namespace cfinsler {

namespace {

Var e_var(int k) { return static_cast<Var>(kE1 + k); }
Var eb_var(int k) { return static_cast<Var>(kEb1 + k); }

// Accumulates |lhs - rhs| over the components of one identity, relative to
// the largest magnitude entering it.
struct Acc {
    double worst = 0.0;
    double scale = 1.0;
    void add(Complex lhs, Complex rhs) {
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    double rel() const { return worst / scale; }
};

}  // namespace

double ResidualReport::worst() const {
    double w = 0.0;
    for (const auto& [k, v] : items) w = std::max(w, v);
    return w;
}

VerticalFrame build_frame(const FundamentalTensor& ft, const JetContext& ctx) {
    Seeds s = seed(ctx);
    if (!(ft.det.value().real() > 0.0))
        throw DomainViolation("non-positive det g at base point; Berwald frame undefined");
    VerticalFrame fr;
    fr.F = sqrt(ft.L);
    fr.sqrt_g = sqrt(ft.det);
    WJet invF = reciprocal(fr.F);
    for (int i = 0; i < 2; ++i) {
        fr.l_up[i] = s.eta[i] * invF;
        WJet acc(ctx.order, 0.0);
        for (int j = 0; j < 2; ++j) acc += ft.g[i][j] * s.etabar[j];
        fr.l_dn[i] = acc * invF;
    }
    WJet inv_sg = reciprocal(fr.sqrt_g);
    fr.m_up[0] = -fr.l_dn[1] * inv_sg;
    fr.m_up[1] = fr.l_dn[0] * inv_sg;
    fr.m_dn[0] = -fr.sqrt_g * fr.l_up[1];
    fr.m_dn[1] = fr.sqrt_g * fr.l_up[0];
    return fr;
}

VerticalScalars vertical_scalars(const VerticalFrame& fr, const ChernFinslerConnection& conn) {
    VerticalScalars vs;
    int order = fr.F.order();
    WJet A(order, 0.0), B(order, 0.0);
    for (int h = 0; h < 2; ++h)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                A += conn.C[h][k][j] * fr.l_dn[h] * fr.m_up[j] * fr.m_up[k];
                B += conn.C[h][j][k] * fr.m_dn[h] * fr.m_up[j] * fr.m_up[k];
            }
    vs.A = A;
    vs.B = B;
    Acc acc;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Complex rhs = (A.value() * fr.l_up[i].value() + B.value() * fr.m_up[i].value()) *
                              fr.m_dn[k].value() * fr.m_dn[j].value();
                acc.add(conn.C[i][j][k].value(), rhs);
            }
    vs.decomposition_residual = acc.rel();
    return vs;
}

HorizontalScalars horizontal_scalars(const VerticalFrame& fr, const ChernFinslerConnection& conn) {
    int order = fr.F.order();
    auto contract = [&](const Vec2& u, const Vec2& v, const Vec2& w) {
        WJet acc(order, 0.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) acc += w[i] * conn.L[i][j][k] * u[j] * v[k];
        return acc;
    };
    HorizontalScalars hs;
    hs.J = contract(fr.l_up, fr.l_up, fr.l_dn);
    hs.U = contract(fr.m_up, fr.l_up, fr.l_dn);
    hs.V = contract(fr.l_up, fr.m_up, fr.l_dn);
    hs.X = contract(fr.m_up, fr.m_up, fr.l_dn);
    hs.O = contract(fr.l_up, fr.l_up, fr.m_dn);
    hs.Y = contract(fr.m_up, fr.l_up, fr.m_dn);
    hs.E = contract(fr.l_up, fr.m_up, fr.m_dn);
    hs.H = contract(fr.m_up, fr.m_up, fr.m_dn);

    Acc acc;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Complex lu = fr.l_up[i].value(), mu = fr.m_up[i].value();
                Complex lj = fr.l_dn[j].value(), mj = fr.m_dn[j].value();
                Complex lk = fr.l_dn[k].value(), mk = fr.m_dn[k].value();
                Complex rhs = hs.J.value() * lu * lj * lk + hs.U.value() * lu * mj * lk +
                              hs.V.value() * lu * lj * mk + hs.X.value() * lu * mj * mk +
                              hs.O.value() * mu * lj * lk + hs.Y.value() * mu * mj * lk +
                              hs.E.value() * mu * lj * mk + hs.H.value() * mu * mj * mk;
                acc.add(conn.L[i][j][k].value(), rhs);
            }
    hs.reconstruction_residual = acc.rel();
    return hs;
}

WJet op_l(const VerticalFrame& fr, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k) acc += fr.l_up[k] * X.derivative(e_var(k), "op_l");
    return acc;
}

WJet op_lbar(const VerticalFrame& fr, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k) acc += fr.l_up[k].conjugate() * X.derivative(eb_var(k), "op_lbar");
    return acc;
}

WJet op_m(const VerticalFrame& fr, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k) acc += fr.m_up[k] * X.derivative(e_var(k), "op_m");
    return acc;
}

WJet op_mbar(const VerticalFrame& fr, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k) acc += fr.m_up[k].conjugate() * X.derivative(eb_var(k), "op_mbar");
    return acc;
}

WJet op_lambda(const VerticalFrame& fr, const Mat2& N, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int i = 0; i < 2; ++i) acc += fr.l_up[i] * adapted_delta(X, i, N, "op_lambda");
    return acc;
}

WJet op_lambda_bar(const VerticalFrame& fr, const Mat2& N, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int i = 0; i < 2; ++i)
        acc += fr.l_up[i].conjugate() * adapted_delta_bar(X, i, N, "op_lambda_bar");
    return acc;
}

WJet op_mu(const VerticalFrame& fr, const Mat2& N, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int i = 0; i < 2; ++i) acc += fr.m_up[i] * adapted_delta(X, i, N, "op_mu");
    return acc;
}

WJet op_mu_bar(const VerticalFrame& fr, const Mat2& N, const WJet& X) {
    WJet acc(X.order(), 0.0);
    for (int i = 0; i < 2; ++i)
        acc += fr.m_up[i].conjugate() * adapted_delta_bar(X, i, N, "op_mu_bar");
    return acc;
}

FrameBundle compute_frame(const GeometryData& gd) {
    FrameBundle fb;
    fb.frame = build_frame(gd.ft, gd.ctx);
    fb.vs = vertical_scalars(fb.frame, gd.conn);
    fb.hs = horizontal_scalars(fb.frame, gd.conn);
    return fb;
}

ResidualReport frame_identity_residuals(const GeometryData& gd, const FrameBundle& fb) {
    const VerticalFrame& fr = fb.frame;
    const WJet& A = fb.vs.A;
    const WJet& B = fb.vs.B;
    const HorizontalScalars& h = fb.hs;
    const Mat2& N = gd.conn.N;
    WJet invF = reciprocal(fr.F);
    WJet inv2F = invF * 0.5;
    WJet Bb = B.conjugate();
    ResidualReport rep;

    auto put = [&](const std::string& name, const Acc& acc) { rep.items[name] = acc.rel(); };
    auto v = [](const WJet& x) { return x.value(); };

    {  // vertical operator table
        Acc acc;
        for (int i = 0; i < 2; ++i) {
            acc.add(v(op_l(fr, fr.l_dn[i])), v(-fr.l_dn[i] * inv2F));
            acc.add(v(op_lbar(fr, fr.l_dn[i])), v(fr.l_dn[i] * inv2F));
            acc.add(v(op_l(fr, fr.m_dn[i])), v(fr.m_dn[i] * inv2F));
            acc.add(v(op_lbar(fr, fr.m_dn[i])), v(-fr.m_dn[i] * inv2F));
            acc.add(v(op_m(fr, fr.l_dn[i])), v(A * fr.m_dn[i]));
            acc.add(v(op_mbar(fr, fr.l_dn[i])), v(fr.m_dn[i] * invF));
            acc.add(v(op_m(fr, fr.m_dn[i])), v(B * fr.m_dn[i] * 0.5 - fr.l_dn[i] * invF));
            acc.add(v(op_mbar(fr, fr.m_dn[i])), v(Bb * fr.m_dn[i] * 0.5));
            acc.add(v(op_l(fr, fr.l_up[i])), v(fr.l_up[i] * inv2F));
            acc.add(v(op_lbar(fr, fr.l_up[i])), v(-fr.l_up[i] * inv2F));
            acc.add(v(op_l(fr, fr.m_up[i])), v(-fr.m_up[i] * inv2F));
            acc.add(v(op_lbar(fr, fr.m_up[i])), v(fr.m_up[i] * inv2F));
            acc.add(v(op_m(fr, fr.l_up[i])), v(fr.m_up[i] * invF));
            acc.add(v(op_mbar(fr, fr.l_up[i])), 0.0);
            acc.add(v(op_m(fr, fr.m_up[i])), v(-B * fr.m_up[i] * 0.5 - A * fr.l_up[i]));
            acc.add(v(op_mbar(fr, fr.m_up[i])), v(-fr.l_up[i] * invF - Bb * fr.m_up[i] * 0.5));
        }
        put("vertical-operator-table", acc);
    }

    // vertical covariant derivatives of the frame components
    auto vcov_dn = [&](const Vec2& w, int i, int j) {
        WJet out = vertical(w[i], j, "vcov");
        for (int l = 0; l < 2; ++l) out -= w[l] * gd.conn.C[l][i][j];
        return out;
    };
    auto vcov_up = [&](const Vec2& w, int i, int j) {
        WJet out = vertical(w[i], j, "vcov");
        for (int l = 0; l < 2; ++l) out += w[l] * gd.conn.C[i][l][j];
        return out;
    };
    {
        Acc acc;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Complex li = v(fr.l_dn[i]), lj = v(fr.l_dn[j]);
                Complex mi = v(fr.m_dn[i]), mj = v(fr.m_dn[j]);
                Complex lbj = std::conj(lj), mbj = std::conj(mj);
                Complex i2F = v(inv2F), iF = v(invF);
                // plain vertical derivative here: the C-connection term cancels the A part
                acc.add(v(vertical(fr.l_dn[i], j)), -li * lj * i2F + v(A) * mi * mj);
                acc.add(v(vertical_bar(fr.l_dn[i], j)), li * lbj * i2F + mi * mbj * iF);
                acc.add(v(vcov_dn(fr.m_dn, i, j)),
                        mi * lj * i2F - li * mj * iF - 0.5 * v(B) * mi * mj);
                acc.add(v(vertical_bar(fr.m_dn[i], j)),
                        -mi * lbj * i2F + 0.5 * v(Bb) * mi * mbj);
                Complex lui = v(fr.l_up[i]), mui = v(fr.m_up[i]);
                acc.add(v(vcov_up(fr.l_up, i, j)), (i == j ? iF : 0.0) - lj * lui * i2F);
                acc.add(v(vertical_bar(fr.l_up[i], j)), -lbj * lui * i2F);
                acc.add(v(vcov_up(fr.m_up, i, j)), -lj * mui * i2F + 0.5 * v(B) * mj * mui);
                acc.add(v(vertical_bar(fr.m_up[i], j)),
                        lbj * mui * i2F - mbj * lui * iF - 0.5 * v(Bb) * mbj * mui);
            }
        for (int j = 0; j < 2; ++j) acc.add(v(vertical(fr.F, j)), 0.5 * v(fr.l_dn[j]));
        put("vertical-covariant-frame", acc);
    }

    {  // A/B vertical expansions and the curvature-invariant seed identity
        Acc acc;
        acc.add(v(op_lbar(fr, A)), v(A * 1.5 * invF));
        acc.add(v(op_lbar(fr, B)), v(B * inv2F));
        acc.add(v(op_l(fr, A)), v(-A * 2.5 * invF));
        acc.add(v(op_l(fr, B)), v(-B * 1.5 * invF));
        acc.add(v(op_mbar(fr, A)), v(-A * Bb + B * invF));
        put("AB-expansions", acc);
    }

    {  // lambda/mu action table
        Acc acc;
        for (int i = 0; i < 2; ++i) {
            acc.add(v(op_lambda(fr, N, fr.l_dn[i])), v(h.J * fr.l_dn[i] + h.U * fr.m_dn[i]));
            acc.add(v(op_lambda_bar(fr, N, fr.l_dn[i])), 0.0);
            acc.add(v(op_lambda_bar(fr, N, fr.l_up[i])), 0.0);
            acc.add(v(op_lambda(fr, N, fr.l_up[i])), v(-h.J * fr.l_up[i] - h.O * fr.m_up[i]));
            acc.add(v(op_lambda(fr, N, fr.m_dn[i])),
                    v(h.O * fr.l_dn[i] - (h.J - h.Y) * fr.m_dn[i] * 0.5));
            acc.add(v(op_lambda_bar(fr, N, fr.m_dn[i])),
                    v((h.J + h.Y).conjugate() * fr.m_dn[i] * 0.5));
            acc.add(v(op_lambda(fr, N, fr.m_up[i])),
                    v(-h.U * fr.l_up[i] + (h.J - h.Y) * fr.m_up[i] * 0.5));
            acc.add(v(op_lambda_bar(fr, N, fr.m_up[i])),
                    v(-(h.J + h.Y).conjugate() * fr.m_up[i] * 0.5));
            acc.add(v(op_mu(fr, N, fr.l_dn[i])), v(h.V * fr.l_dn[i] + h.X * fr.m_dn[i]));
            acc.add(v(op_mu_bar(fr, N, fr.l_dn[i])), 0.0);
            acc.add(v(op_mu_bar(fr, N, fr.l_up[i])), 0.0);
            acc.add(v(op_mu(fr, N, fr.l_up[i])), v(-h.V * fr.l_up[i] - h.E * fr.m_up[i]));
            acc.add(v(op_mu(fr, N, fr.m_dn[i])),
                    v(h.E * fr.l_dn[i] + (h.H - h.V) * fr.m_dn[i] * 0.5));
            acc.add(v(op_mu_bar(fr, N, fr.m_dn[i])),
                    v((h.V + h.H).conjugate() * fr.m_dn[i] * 0.5));
            acc.add(v(op_mu(fr, N, fr.m_up[i])),
                    v(-h.X * fr.l_up[i] - (h.H - h.V) * fr.m_up[i] * 0.5));
            acc.add(v(op_mu_bar(fr, N, fr.m_up[i])),
                    v(-(h.V + h.H).conjugate() * fr.m_up[i] * 0.5));
        }
        acc.add(v(op_lambda(fr, N, gd.ft.det)), v((h.J + h.Y) * gd.ft.det));
        acc.add(v(op_mu(fr, N, gd.ft.det)), v((h.V + h.H) * gd.ft.det));
        acc.add(v(op_lambda(fr, N, gd.ft.L)), 0.0);
        acc.add(v(op_mu(fr, N, gd.ft.L)), 0.0);
        put("lambda-mu-table", acc);
    }

    // horizontal covariant derivatives of the frame components
    auto hcov_dn = [&](const Vec2& w, int i, int j) {
        WJet out = adapted_delta(w[i], j, N, "hcov");
        for (int l = 0; l < 2; ++l) out -= w[l] * gd.conn.L[l][i][j];
        return out;
    };
    auto hcov_up = [&](const Vec2& w, int i, int j) {
        WJet out = adapted_delta(w[i], j, N, "hcov");
        for (int l = 0; l < 2; ++l) out += w[l] * gd.conn.L[i][l][j];
        return out;
    };
    {
        Acc acc;
        WJet JY = h.J + h.Y;
        WJet VH = h.V + h.H;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                acc.add(v(hcov_dn(fr.l_dn, i, j)), 0.0);
                acc.add(v(adapted_delta_bar(fr.l_dn[i], j, N)), 0.0);
                acc.add(v(hcov_up(fr.l_up, i, j)), 0.0);
                acc.add(v(adapted_delta_bar(fr.l_up[i], j, N)), 0.0);
                Complex br = v(JY) * v(fr.l_dn[j]) + v(VH) * v(fr.m_dn[j]);
                Complex brbar = std::conj(br);
                acc.add(v(hcov_dn(fr.m_dn, i, j)), -0.5 * br * v(fr.m_dn[i]));
                acc.add(v(adapted_delta_bar(fr.m_dn[i], j, N)), 0.5 * brbar * v(fr.m_dn[i]));
                acc.add(v(hcov_up(fr.m_up, i, j)), 0.5 * br * v(fr.m_up[i]));
                acc.add(v(adapted_delta_bar(fr.m_up[i], j, N)), -0.5 * brbar * v(fr.m_up[i]));
            }
        put("horizontal-covariant-frame", acc);
    }

    {  // vertical expansions of the horizontal scalars
        Acc acc;
        for (int k = 0; k < 2; ++k) {
            Complex lk = v(fr.l_dn[k]), mk = v(fr.m_dn[k]);
            Complex iF = v(invF);
            acc.add(v(vertical(h.J, k)),
                    0.5 * v(h.J) * iF * lk + ((v(h.U) + v(h.V)) * iF + v(A) * v(h.O)) * mk);
            acc.add(v(vertical(h.V, k)),
                    -0.5 * v(h.V) * iF * lk +
                        (v(A) * (v(h.E) - v(h.J)) - 0.5 * v(B) * v(h.V) + v(h.X) * iF) * mk);
            acc.add(v(vertical(h.O, k)),
                    1.5 * v(h.O) * iF * lk +
                        ((v(h.E) + v(h.Y) - v(h.J)) * iF + 0.5 * v(B) * v(h.O)) * mk);
            acc.add(v(vertical(h.E, k)),
                    0.5 * v(h.E) * iF * lk +
                        ((v(h.H) - v(h.V)) * iF - v(A) * v(h.O)) * mk);
        }
        put("horizontal-scalar-expansions", acc);
    }

    return rep;
}

KahlerScalarTest kahler_scalar_test(const HorizontalScalars& hs) {
    KahlerScalarTest t;
    t.scale = std::max({1.0, std::abs(hs.U.value()), std::abs(hs.V.value()),
                        std::abs(hs.Y.value()), std::abs(hs.E.value())});
    t.uv_residual = std::abs(hs.U.value() - hs.V.value()) / t.scale;
    t.ye_residual = std::abs(hs.Y.value() - hs.E.value()) / t.scale;
    return t;
}

}  // namespace cfinsler
