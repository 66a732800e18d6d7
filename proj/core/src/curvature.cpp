#include "cfinsler/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace cfinsler {

namespace {

Var e_var(int k) { return static_cast<Var>(kE1 + k); }
Var eb_var(int k) { return static_cast<Var>(kEb1 + k); }

struct Acc {
    double worst = 0.0;
    double scale = 1.0;
    void add(Complex lhs, Complex rhs) {
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    double rel() const { return worst / scale; }
};

Complex v(const WJet& x) { return x.value(); }

// h-covariant derivative of a scalar contracted with eta: X_{|0}
WJet hcov0(const WJet& X, const GeometryData& gd) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k)
        acc += gd.seeds.eta[k] * adapted_delta(X, k, gd.conn.N, "hcov0");
    return acc;
}

// X_{|0bar} = delta_kbar X etabar^k
WJet hcov0_bar(const WJet& X, const GeometryData& gd) {
    WJet acc(X.order(), 0.0);
    for (int k = 0; k < 2; ++k)
        acc += gd.seeds.etabar[k] * adapted_delta_bar(X, k, gd.conn.N, "hcov0_bar");
    return acc;
}

}  // namespace

CurvatureTensors curvature_tensors(const GeometryData& gd) {
    CurvatureTensors cv;
    const auto& conn = gd.conn;
    Mat2 dbarN;  // d._hbar N^l_k, indexed [l][k] per h inside the loop
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet r = -adapted_delta_bar(conn.L[i][j][k], h, conn.N, "R");
                    WJet p = -vertical_bar(conn.L[i][j][k], h, "P");
                    for (int l = 0; l < 2; ++l) {
                        r -= adapted_delta_bar(conn.N[l][k], h, conn.N, "R") * conn.C[i][j][l];
                        p -= vertical_bar(conn.N[l][k], h, "P") * conn.C[i][j][l];
                    }
                    cv.R[i][j][h][k] = r;
                    cv.P[i][j][h][k] = p;
                    cv.Xi[i][j][h][k] = -adapted_delta_bar(conn.C[i][j][k], h, conn.N, "Xi");
                    cv.S[i][j][h][k] = -vertical_bar(conn.C[i][j][k], h, "S");
                }
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet rr(gd.ctx.order, 0.0), pp = rr, xx = rr, ss = rr;
                    for (int i = 0; i < 2; ++i) {
                        rr += gd.ft.g[i][r] * cv.R[i][j][h][k];
                        pp += gd.ft.g[i][r] * cv.P[i][j][h][k];
                        xx += gd.ft.g[i][r] * cv.Xi[i][j][h][k];
                        ss += gd.ft.g[i][r] * cv.S[i][j][h][k];
                    }
                    cv.Rl[r][j][h][k] = rr;
                    cv.Pl[r][j][h][k] = pp;
                    cv.Xil[r][j][h][k] = xx;
                    cv.Sl[r][j][h][k] = ss;
                }
    return cv;
}

ResidualReport conjugation_residuals(const CurvatureTensors& cv) {
    ResidualReport rep;
    Acc r_pair, xp_pair, s_sym;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int h = 0; h < 2; ++h) {
                    r_pair.add(std::conj(v(cv.Rl[i][j][k][h])), v(cv.Rl[j][i][h][k]));
                    xp_pair.add(std::conj(v(cv.Xil[i][j][k][h])), v(cv.Pl[j][i][h][k]));
                    xp_pair.add(std::conj(v(cv.Pl[i][j][k][h])), v(cv.Xil[j][i][h][k]));
                    s_sym.add(std::conj(v(cv.Sl[i][j][k][h])), v(cv.Sl[j][i][h][k]));
                    s_sym.add(v(cv.Sl[i][j][k][h]), v(cv.Sl[k][j][i][h]));
                    s_sym.add(v(cv.Sl[i][j][k][h]), v(cv.Sl[i][h][k][j]));
                }
    rep.items["R-conjugation"] = r_pair.rel();
    rep.items["Xi-P-conjugation"] = xp_pair.rel();
    rep.items["S-symmetries"] = s_sym.rel();
    return rep;
}

ResidualReport prop21_residuals(const GeometryData& gd, const CurvatureTensors& cv) {
    ResidualReport rep;
    const auto& conn = gd.conn;
    const auto& seeds = gd.seeds;

    {  // i) R^i_{0 hbar k} = -delta_hbar N^i_k, plus the lowered variant
        Acc acc;
        for (int i = 0; i < 2; ++i)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet lhs(gd.ctx.order, 0.0), lhs_low = lhs;
                    for (int j = 0; j < 2; ++j) {
                        lhs += cv.R[i][j][h][k] * seeds.eta[j];
                        lhs_low += cv.Rl[i][j][h][k] * seeds.eta[j];
                    }
                    WJet dN = adapted_delta_bar(conn.N[i][k], h, conn.N, "prop21");
                    acc.add(v(lhs), -v(dN));
                    WJet low(gd.ctx.order, 0.0);
                    for (int l = 0; l < 2; ++l)
                        low += gd.ft.g[l][i] * adapted_delta_bar(conn.N[l][k], h, conn.N, "prop21");
                    acc.add(v(lhs_low), -v(low));
                }
        rep.items["i"] = acc.rel();
    }
    {  // ii) P^i_{0 hbar k} = -d._hbar N^i_k; P_{rbar 0 hbar k} = -C_{0 rbar hbar | k};
        //     P^i_{0 0bar k} = 0
        Acc acc;
        // C_{l rbar hbar} = d._hbar g_{l rbar}
        for (int r = 0; r < 2; ++r)
            for (int h = 0; h < 2; ++h) {
                WJet c0(gd.ctx.order, 0.0);
                for (int l = 0; l < 2; ++l)
                    c0 += seeds.eta[l] * vertical_bar(gd.ft.g[l][r], h, "prop21");
                for (int k = 0; k < 2; ++k) {
                    WJet lhs(gd.ctx.order, 0.0);
                    for (int j = 0; j < 2; ++j) lhs += cv.Pl[r][j][h][k] * seeds.eta[j];
                    acc.add(v(lhs), -v(adapted_delta(c0, k, conn.N, "prop21")));
                }
            }
        for (int i = 0; i < 2; ++i)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet lhs(gd.ctx.order, 0.0);
                    for (int j = 0; j < 2; ++j) lhs += cv.P[i][j][h][k] * seeds.eta[j];
                    acc.add(v(lhs), -v(vertical_bar(conn.N[i][k], h, "prop21")));
                }
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                WJet lhs(gd.ctx.order, 0.0);
                for (int j = 0; j < 2; ++j)
                    for (int h = 0; h < 2; ++h)
                        lhs += cv.P[i][j][h][k] * seeds.eta[j] * seeds.etabar[h];
                acc.add(v(lhs), 0.0);
            }
        rep.items["ii"] = acc.rel();
    }
    {  // iii) the eta contractions of Xi and S vanish
        Acc acc;
        for (int i = 0; i < 2; ++i)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet a(gd.ctx.order, 0.0), b = a, c = a, d = a;
                    for (int j = 0; j < 2; ++j) {
                        a += cv.Xi[i][j][h][k] * seeds.eta[j];
                        b += cv.Xi[i][k][h][j] * seeds.eta[j];
                        c += cv.S[i][j][h][k] * seeds.eta[j];
                        d += cv.S[i][k][h][j] * seeds.eta[j];
                    }
                    acc.add(v(a), 0.0);
                    acc.add(v(b), 0.0);
                    acc.add(v(c), 0.0);
                    acc.add(v(d), 0.0);
                }
        rep.items["iii"] = acc.rel();
    }
    {  // iv) C_{l rbar hbar | k} = (d._hbar L^i_{lk}) g_{i rbar} + (d._hbar N^i_k) C_{i rbar l}
        Acc acc;
        for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k) {
                        WJet c_lrh = vertical_bar(gd.ft.g[l][r], h, "prop21");
                        WJet lhs = adapted_delta(c_lrh, k, conn.N, "prop21");
                        for (int s = 0; s < 2; ++s)
                            lhs -= vertical_bar(gd.ft.g[s][r], h, "prop21") * conn.L[s][l][k];
                        WJet rhs(gd.ctx.order, 0.0);
                        for (int i = 0; i < 2; ++i) {
                            rhs += vertical_bar(conn.L[i][l][k], h, "prop21") * gd.ft.g[i][r];
                            // C_{i rbar l} = C^s_{il} g_{s rbar} = d._l g_{i rbar}
                            rhs += vertical_bar(conn.N[i][k], h, "prop21") *
                                   vertical(gd.ft.g[i][r], l, "prop21");
                        }
                        acc.add(v(lhs), v(rhs));
                    }
        rep.items["iv"] = acc.rel();
    }
    {  // v) C_{l rbar h | k} = (d._h L^i_{lk}) g_{i rbar}
        Acc acc;
        for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k) {
                        WJet c_lrh = vertical(gd.ft.g[l][r], h, "prop21");
                        WJet lhs = adapted_delta(c_lrh, k, conn.N, "prop21");
                        for (int s = 0; s < 2; ++s) {
                            lhs -= vertical(gd.ft.g[s][r], h, "prop21") * conn.L[s][l][k];
                            lhs -= vertical(gd.ft.g[l][r], s, "prop21") * conn.L[s][h][k];
                        }
                        WJet rhs(gd.ctx.order, 0.0);
                        for (int i = 0; i < 2; ++i)
                            rhs += vertical(conn.L[i][l][k], h, "prop21") * gd.ft.g[i][r];
                        acc.add(v(lhs), v(rhs));
                    }
        rep.items["v"] = acc.rel();
    }
    {  // vi) P^i_{j hbar k} = P^i_{0 hbar k}|_j + P^i_{0 hbar r} C^r_{kj}
        Acc acc;
        Ten3 P0;  // [i][h][k]
        for (int i = 0; i < 2; ++i)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet s(gd.ctx.order, 0.0);
                    for (int j = 0; j < 2; ++j) s += cv.P[i][j][h][k] * seeds.eta[j];
                    P0[i][h][k] = s;
                }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k) {
                        WJet rhs = vertical(P0[i][h][k], j, "prop21");
                        for (int l = 0; l < 2; ++l) {
                            rhs += P0[l][h][k] * conn.C[i][l][j];   // up slot
                            rhs -= P0[i][h][l] * conn.C[l][k][j];   // down slot
                            rhs += P0[i][h][l] * conn.C[l][k][j];   // explicit extra term
                        }
                        acc.add(v(cv.P[i][j][h][k]), v(rhs));
                    }
        rep.items["vi"] = acc.rel();
    }
    return rep;
}

InvariantI invariant_I(const GeometryData& gd, const FrameBundle& fb,
                       const CurvatureTensors& cv) {
    InvariantI out;
    const auto& fr = fb.frame;
    const WJet& B = fb.vs.B;
    WJet I(gd.ctx.order, 0.0);
    for (int s = 0; s < 2; ++s)
        I -= fr.m_up[s].conjugate() * vertical_bar(B, s, "invariant_I");
    I -= B * B.conjugate() * 0.5;
    out.I = I;

    Acc structure, contraction;
    Complex four = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    Complex mr = std::conj(v(fr.m_dn[r])), mh = std::conj(v(fr.m_dn[h]));
                    Complex mj = v(fr.m_dn[j]), mk = v(fr.m_dn[k]);
                    structure.add(v(cv.Sl[r][j][h][k]), v(I) * mh * mr * mj * mk);
                    four += v(cv.Sl[r][j][h][k]) * std::conj(v(fr.m_up[r])) * v(fr.m_up[j]) *
                            std::conj(v(fr.m_up[h])) * v(fr.m_up[k]);
                }
    out.structure_residual = structure.rel();
    contraction.add(four, v(I));
    out.contraction_residual = contraction.rel();
    out.imag_defect = std::abs(v(I).imag()) / (1.0 + std::abs(v(I)));
    return out;
}

WJet invariant_K(const GeometryData& gd, const FrameBundle& fb) {
    WJet J0bar = hcov0_bar(fb.hs.J, gd);
    return -(J0bar * reciprocal(fb.frame.F));
}

WJet invariant_W(const GeometryData& gd, const FrameBundle& fb) {
    const auto& fr = fb.frame;
    const auto& hs = fb.hs;
    WJet Hmu = op_mu_bar(fr, gd.conn.N, hs.H);
    WJet Emu = op_mu_bar(fr, gd.conn.N, hs.E);
    WJet VHbar = hs.V.conjugate() + hs.H.conjugate();
    return -Hmu - hs.H * VHbar * 0.5 - fb.vs.B * fr.F * Emu;
}

SectionalCurvatures sectional_curvatures(const GeometryData& gd, const FrameBundle& fb,
                                         const CurvatureTensors& cv) {
    SectionalCurvatures sc;
    const auto& fr = fb.frame;
    auto contract4 = [&](const Ten4& T, const Vec2& w) {
        Complex acc = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k)
                        acc += v(T[r][j][h][k]) * std::conj(v(w[r])) * v(w[j]) *
                               std::conj(v(w[h])) * v(w[k]);
        return acc;
    };
    InvariantI invI = invariant_I(gd, fb, cv);
    sc.Kv_l_contraction = 2.0 * contract4(cv.Sl, fr.l_up);
    sc.Kv_l_formula = 0.0;
    sc.Kv_m_contraction = 2.0 * contract4(cv.Sl, fr.m_up);
    sc.Kv_m_formula = 2.0 * v(invI.I);
    sc.Kh_lambda_contraction = 2.0 * contract4(cv.Rl, fr.l_up);
    sc.Kh_lambda_formula = 2.0 * v(invariant_K(gd, fb));
    sc.Kh_mu_contraction = 2.0 * contract4(cv.Rl, fr.m_up);
    sc.Kh_mu_formula = 2.0 * v(invariant_W(gd, fb));
    Acc acc;
    acc.add(sc.Kv_l_contraction, sc.Kv_l_formula);
    acc.add(sc.Kv_m_contraction, sc.Kv_m_formula);
    acc.add(sc.Kh_lambda_contraction, sc.Kh_lambda_formula);
    acc.add(sc.Kh_mu_contraction, sc.Kh_mu_formula);
    sc.worst_disagreement = acc.rel();
    return sc;
}

double hh_decomposition_residual(const GeometryData& gd, const FrameBundle& fb,
                                 const CurvatureTensors& cv) {
    const auto& fr = fb.frame;
    const auto& hs = fb.hs;
    const Mat2& N = gd.conn.N;
    const WJet& F = fr.F;
    WJet invF = reciprocal(F);
    const WJet &J = hs.J, &V = hs.V, &O = hs.O, &Y = hs.Y, &E = hs.E, &H = hs.H;
    const WJet& B = fb.vs.B;
    WJet Jb = J.conjugate(), Yb = Y.conjugate(), Vb = V.conjugate(), Hb = H.conjugate();
    WJet Ob = O.conjugate(), Eb = E.conjugate(), Bb = B.conjugate();

    WJet Kinv = invariant_K(gd, fb);
    WJet Winv = invariant_W(gd, fb);

    // the sixteen coefficients, ordered by the (rbar, j, hbar, k) frame factors
    WJet c_llll = Kinv;
    WJet c_mmmm = Winv;
    WJet c_lmll = -(invF * hcov0(Ob, gd) - Ob * (J + Y) * 0.5);
    WJet c_mlll = -(invF * hcov0_bar(O, gd) - O * (Jb + Yb) * 0.5);
    WJet c_lllm = -op_mu(fr, N, Jb);
    WJet c_llml = -op_mu_bar(fr, N, J);
    WJet c_llmm = -(op_mu_bar(fr, N, V) + V * (Vb + Hb) * 0.5);
    WJet c_mllm = -(invF * hcov0(Eb, gd));
    WJet c_lmml = -(invF * hcov0_bar(E, gd));
    WJet c_mmll = -(invF * hcov0_bar(Y, gd) + B * hcov0_bar(O, gd) -
                    F * B * O * (Jb + Yb) * 0.5);
    WJet c_mlmm = -op_mu_bar(fr, N, E);
    WJet c_mmml = -(invF * hcov0(Hb, gd) + Hb * (J + Y) * 0.5 + Bb * hcov0(Eb, gd));
    WJet c_lmmm = -op_mu(fr, N, Eb);
    WJet c_mmlm = -(invF * hcov0_bar(H, gd) + H * (Jb + Yb) * 0.5 + B * hcov0_bar(E, gd));
    WJet c_mlml = -(op_mu_bar(fr, N, O) - O * (Vb + Hb) * 0.5);
    WJet c_lmlm = -(op_mu(fr, N, Ob) - Ob * (V + H) * 0.5);

    Acc acc;
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    Complex lr = std::conj(v(fr.l_dn[r])), mr = std::conj(v(fr.m_dn[r]));
                    Complex lh = std::conj(v(fr.l_dn[h])), mh = std::conj(v(fr.m_dn[h]));
                    Complex lj = v(fr.l_dn[j]), mj = v(fr.m_dn[j]);
                    Complex lk = v(fr.l_dn[k]), mk = v(fr.m_dn[k]);
                    Complex rhs = v(c_llll) * lr * lj * lh * lk + v(c_mmmm) * mr * mj * mh * mk +
                                  v(c_lmll) * lr * mj * lh * lk + v(c_mlll) * mr * lj * lh * lk +
                                  v(c_lllm) * lr * lj * lh * mk + v(c_llml) * lr * lj * mh * lk +
                                  v(c_llmm) * lr * lj * mh * mk + v(c_mllm) * mr * lj * lh * mk +
                                  v(c_lmml) * lr * mj * mh * lk + v(c_mmll) * mr * mj * lh * lk +
                                  v(c_mlmm) * mr * lj * mh * mk + v(c_mmml) * mr * mj * mh * lk +
                                  v(c_lmmm) * lr * mj * mh * mk + v(c_mmlm) * mr * mj * lh * mk +
                                  v(c_mlml) * mr * lj * mh * lk + v(c_lmlm) * lr * mj * lh * mk;
                    acc.add(v(cv.Rl[r][j][h][k]), rhs);
                }
    return acc.rel();
}

ResidualReport bianchi_residuals(const GeometryData& gd, const CurvatureTensors& cv) {
    ResidualReport rep;
    const auto& conn = gd.conn;
    const auto& seeds = gd.seeds;

    // conjugate up blocks contracted with eta: P^sbar_{0bar l hbar}, R^sbar_{0bar k hbar}
    auto conj_contract = [&](const Ten4& T, int s, int l, int h) {
        WJet acc(gd.ctx.order, 0.0);
        for (int j = 0; j < 2; ++j) acc += T[s][j][l][h] * seeds.eta[j];
        return acc.conjugate();
    };

    {  // (3.2): R_{rbar j hbar k}|_l - Xi_{rbar j hbar l | k}
       //        - P_{rbar j sbar k} P^sbar_{0bar l hbar}
       //        + S_{rbar j sbar l} R^sbar_{0bar k hbar} + R_{rbar j hbar n} C^n_{kl} = 0
        Acc acc;
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k)
                        for (int l = 0; l < 2; ++l) {
                            WJet t = vertical(cv.Rl[r][j][h][k], l, "bianchi");
                            for (int s = 0; s < 2; ++s) {
                                t -= cv.Rl[r][s][h][k] * conn.C[s][j][l];
                                t -= cv.Rl[r][j][h][s] * conn.C[s][k][l];
                            }
                            WJet xi = adapted_delta(cv.Xil[r][j][h][l], k, conn.N, "bianchi");
                            for (int s = 0; s < 2; ++s) {
                                xi -= cv.Xil[r][s][h][l] * conn.L[s][j][k];
                                xi -= cv.Xil[r][j][h][s] * conn.L[s][l][k];
                            }
                            t -= xi;
                            for (int s = 0; s < 2; ++s) {
                                t -= cv.Pl[r][j][s][k] * conj_contract(cv.P, s, l, h);
                                t += cv.Sl[r][j][s][l] * conj_contract(cv.R, s, k, h);
                                t += cv.Rl[r][j][h][s] * conn.C[s][k][l];
                            }
                            acc.add(v(t), 0.0);
                        }
        rep.items["3.2"] = acc.rel();
    }
    {  // (3.2'): antisymmetrized h-derivative identity with the torsion tail
        Acc acc;
        auto hterm = [&](int r, int j, int h, int k, int l) {
            WJet t = adapted_delta(cv.Rl[r][j][h][k], l, conn.N, "bianchi");
            for (int s = 0; s < 2; ++s) {
                t -= cv.Rl[r][s][h][k] * conn.L[s][j][l];
                t -= cv.Rl[r][j][h][s] * conn.L[s][k][l];
                t -= cv.Pl[r][j][s][k] * conj_contract(cv.R, s, l, h);
            }
            return t;
        };
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k)
                        for (int l = 0; l < 2; ++l) {
                            WJet t = hterm(r, j, h, k, l) - hterm(r, j, h, l, k);
                            for (int n = 0; n < 2; ++n)
                                t += cv.Rl[r][j][h][n] * gd.torsion.T[n][k][l];
                            acc.add(v(t), 0.0);
                        }
        rep.items["3.2'"] = acc.rel();
    }
    {  // (2.9;): Xi_{rbar j hbar k}|_sbar - S_{rbar j sbar k | hbar}
       //         + Xi_{rbar j pbar k} conj(C^p_{sh}) = 0
        Acc acc;
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k)
                        for (int s = 0; s < 2; ++s) {
                            WJet t = vertical_bar(cv.Xil[r][j][h][k], s, "bianchi");
                            for (int p = 0; p < 2; ++p) {
                                t -= cv.Xil[p][j][h][k] * conn.C[p][r][s].conjugate();
                                t -= cv.Xil[r][j][p][k] * conn.C[p][h][s].conjugate();
                            }
                            WJet sd = adapted_delta_bar(cv.Sl[r][j][s][k], h, conn.N, "bianchi");
                            for (int p = 0; p < 2; ++p) {
                                sd -= cv.Sl[p][j][s][k] * conn.L[p][r][h].conjugate();
                                sd -= cv.Sl[r][j][p][k] * conn.L[p][s][h].conjugate();
                            }
                            t -= sd;
                            for (int p = 0; p < 2; ++p)
                                t += cv.Xil[r][j][p][k] * conn.C[p][s][h].conjugate();
                            acc.add(v(t), 0.0);
                        }
        rep.items["2.9;"] = acc.rel();
    }
    {  // S_{rbar j hbar k}|_i = S_{rbar j hbar i}|_k
        Acc acc;
        auto vterm = [&](int r, int j, int h, int k, int i) {
            WJet t = vertical(cv.Sl[r][j][h][k], i, "bianchi");
            for (int s = 0; s < 2; ++s) {
                t -= cv.Sl[r][s][h][k] * conn.C[s][j][i];
                t -= cv.Sl[r][j][h][s] * conn.C[s][k][i];
            }
            return t;
        };
        for (int r = 0; r < 2; ++r)
            for (int j = 0; j < 2; ++j)
                for (int h = 0; h < 2; ++h)
                    for (int k = 0; k < 2; ++k)
                        for (int i = 0; i < 2; ++i)
                            acc.add(v(vterm(r, j, h, k, i)), v(vterm(r, j, h, i, k)));
        rep.items["S-exchange"] = acc.rel();
    }
    return rep;
}

double theorem41_iii_residual(const WJet& I, const GeometryData& gd) {
    WJet I0(gd.ctx.order, 0.0);
    for (int k = 0; k < 2; ++k)
        I0 += gd.seeds.eta[k] * vertical(I, k, "theorem41");
    Acc acc;
    acc.add(v(I0), -v(I));
    return acc.rel();
}

ResidualReport prop42_residuals(const GeometryData& gd, const FrameBundle& fb) {
    ResidualReport rep;
    const auto& fr = fb.frame;
    const auto& hs = fb.hs;
    const Mat2& N = gd.conn.N;
    const WJet& F = fr.F;
    WJet invF = reciprocal(F);
    const WJet &J = hs.J, &U = hs.U, &V = hs.V, &X = hs.X;
    const WJet &O = hs.O, &Y = hs.Y, &E = hs.E, &H = hs.H;
    const WJet& A = fb.vs.A;
    const WJet& B = fb.vs.B;
    WJet Ab = A.conjugate(), Bb = B.conjugate();
    WJet mO = op_mbar(fr, O) - Bb * O * 0.5;
    WJet mE = op_mbar(fr, E) + invF * O;

    {  // i) vertical-bar expansions of J and V
        Acc acc;
        for (int k = 0; k < 2; ++k) {
            Complex lkb = std::conj(v(fr.l_dn[k])), mkb = std::conj(v(fr.m_dn[k]));
            acc.add(v(vertical_bar(J, k, "prop42")),
                    -v(J * invF) * 0.5 * lkb + v(O * invF) * mkb);
            acc.add(v(vertical_bar(V, k, "prop42")),
                    v(V * invF) * 0.5 * lkb + (v((E - J) * invF) - 0.5 * v(Bb * V)) * mkb);
        }
        rep.items["i"] = acc.rel();
    }
    {  // ii) the lbar eigenrelations
        Acc acc;
        acc.add(v(op_lbar(fr, U) - U * invF * 0.5), 0.0);
        acc.add(v(op_lbar(fr, X) - X * invF * 1.5), 0.0);
        acc.add(v(op_lbar(fr, O) + O * invF * 1.5), 0.0);
        acc.add(v(op_lbar(fr, Y) + Y * invF * 0.5), 0.0);
        acc.add(v(op_lbar(fr, E) + E * invF * 0.5), 0.0);
        acc.add(v(op_lbar(fr, H) - H * invF * 0.5), 0.0);
        rep.items["ii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_mbar(fr, U) - invF * (Y - J) + Bb * U * 0.5 + F * A * mO), 0.0);
        rep.items["iii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_mbar(fr, V) - invF * (E - J) + Bb * V * 0.5), 0.0);
        rep.items["iv"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_mbar(fr, X) - invF * (H - U - V) + Bb * X + F * A * mE), 0.0);
        rep.items["v"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(invF * hcov0(Ab, gd) + Ab * (J + Y)), v(mO));
        rep.items["vi"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(invF * hcov0(Bb, gd) + Bb * (J + Y) * 0.5),
                v(op_mbar(fr, Y) + invF * O + F * B * mO));
        rep.items["vii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_mu(fr, N, Ab) + Ab * (V + H)), v(mE));
        rep.items["viii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_mu(fr, N, Bb) + Bb * (V + H) * 0.5),
                v(op_mbar(fr, H) + invF * (Y + E) + Bb * H * 0.5 + F * B * mE));
        rep.items["ix"] = acc.rel();
    }
    return rep;
}

ResidualReport prop43_residuals(const GeometryData& gd, const FrameBundle& fb) {
    ResidualReport rep;
    const auto& fr = fb.frame;
    const auto& hs = fb.hs;
    const Mat2& N = gd.conn.N;
    WJet invF = reciprocal(fr.F);
    const WJet &J = hs.J, &U = hs.U, &V = hs.V, &X = hs.X;
    const WJet &O = hs.O, &Y = hs.Y, &E = hs.E, &H = hs.H;
    const WJet& A = fb.vs.A;
    const WJet& B = fb.vs.B;

    {
        Acc acc;
        acc.add(v(op_l(fr, U) + U * invF * 0.5), 0.0);
        acc.add(v(op_l(fr, X) + X * invF * 1.5), 0.0);
        acc.add(v(op_l(fr, Y) - Y * invF * 0.5), 0.0);
        acc.add(v(op_l(fr, H) + H * invF * 0.5), 0.0);
        rep.items["i"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_m(fr, U) - A * (Y - J) + B * U * 0.5 - invF * X),
                v(invF * hcov0(A, gd) - A * (J + Y)));
        rep.items["ii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_m(fr, Y) + A * O - invF * (H - U)),
                v(invF * hcov0(B, gd) - B * (J + Y) * 0.5));
        rep.items["iii"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_m(fr, X) + A * (U + V - H) + B * X),
                v(op_mu(fr, N, A) - A * (V + H)));
        rep.items["iv"] = acc.rel();
    }
    {
        Acc acc;
        acc.add(v(op_m(fr, H) + A * (Y + E) + invF * X + B * H * 0.5),
                v(op_mu(fr, N, B) - B * (V + H) * 0.5));
        rep.items["v"] = acc.rel();
    }
    return rep;
}

SprayHolomorphyTest lemma41_test(const GeometryData& gd, const FrameBundle& fb) {
    SprayHolomorphyTest out;
    const auto& fr = fb.frame;
    Acc spray;
    for (int i = 0; i < 2; ++i)
        for (int h = 0; h < 2; ++h) spray.add(v(gd.spray.Gbar[i][h]), 0.0);
    // normalize by the spray scale so the flag is scale-free
    double gscale = 1.0;
    for (int i = 0; i < 2; ++i) gscale = std::max(gscale, std::abs(v(gd.spray.G[i])));
    out.spray_residual = spray.worst / gscale;

    WJet Ab = fb.vs.A.conjugate();
    WJet scalar = hcov0(Ab, gd) + fr.F * Ab * (fb.hs.J + fb.hs.Y);
    out.scalar_residual = std::abs(v(scalar)) / (1.0 + std::abs(v(fb.vs.A)));

    Acc link;
    for (int i = 0; i < 2; ++i)
        for (int h = 0; h < 2; ++h)
            link.add(v(gd.spray.Gbar[i][h]),
                     0.5 * v(fr.F * scalar) * v(fr.m_up[i]) * std::conj(v(fr.m_dn[h])));
    out.link_residual = link.rel();
    return out;
}

double invariant_I_hcov_residual(const WJet& I, const GeometryData& gd) {
    Acc acc;
    for (int j = 0; j < 2; ++j)
        acc.add(v(adapted_delta(I, j, gd.conn.N, "invariant_I_hcov")), 0.0);
    return acc.worst / (1.0 + std::abs(v(I)));
}

double weak_symmetry_residual(const GeometryData& gd, const CurvatureTensors& cv) {
    const auto& seeds = gd.seeds;
    Acc acc;
    for (int k = 0; k < 2; ++k) {
        WJet lhs(gd.ctx.order, 0.0), rhs = lhs;
        for (int r = 0; r < 2; ++r)
            for (int h = 0; h < 2; ++h)
                for (int j = 0; j < 2; ++j) {
                    lhs += cv.Rl[r][k][h][j] * seeds.etabar[r] * seeds.etabar[h] * seeds.eta[j];
                    rhs += cv.Rl[r][j][h][k] * seeds.etabar[r] * seeds.etabar[h] * seeds.eta[j];
                }
        acc.add(v(lhs), v(rhs));
    }
    return acc.rel();
}

SpecialFormFit special_form_fit(const GeometryData& gd, const CurvatureTensors& cv) {
    SpecialFormFit out;
    // basis component B_{rbar j hbar k} = g_{j rbar} g_{k hbar} + g_{k rbar} g_{j hbar}
    auto basis = [&](int r, int j, int h, int k) {
        return gd.ft.g[j][r] * gd.ft.g[k][h] + gd.ft.g[k][r] * gd.ft.g[j][h];
    };
    WJet num(gd.ctx.order, 0.0), den = num;
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k) {
                    WJet b = basis(r, j, h, k);
                    num += b.conjugate() * cv.Rl[r][j][h][k];
                    den += b.conjugate() * b;
                }
    out.K_fit = num * reciprocal(den);
    Acc acc;
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 2; ++j)
            for (int h = 0; h < 2; ++h)
                for (int k = 0; k < 2; ++k)
                    acc.add(v(cv.Rl[r][j][h][k]), v(out.K_fit * basis(r, j, h, k)));
    out.residual = acc.rel();
    double vd = 0.0;
    for (int k = 0; k < 2; ++k)
        vd = std::max(vd, std::abs(v(vertical(out.K_fit, k, "special_form"))));
    out.vertical_defect = vd / (1.0 + std::abs(v(out.K_fit)));
    return out;
}

CurvatureData compute_curvature(const GeometryData& gd, const FrameBundle& fb) {
    CurvatureData cd;
    cd.tensors = curvature_tensors(gd);
    cd.inv_I = invariant_I(gd, fb, cd.tensors);
    cd.inv_K = invariant_K(gd, fb);
    cd.inv_W = invariant_W(gd, fb);
    cd.sectional = sectional_curvatures(gd, fb, cd.tensors);
    return cd;
}

}  // namespace cfinsler
