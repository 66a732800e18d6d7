// End-to-end acceptance gate: ten numbered criteria, one PASS/FAIL line each,
// nonzero exit if any fail. Deviations from the source formulas that were
// resolved during development are noted inline where they apply.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cfinsler/classify.hpp"
#include "cfinsler/curvature.hpp"
#include "cfinsler/frame.hpp"
#include "cfinsler/geometry.hpp"
#include "cfinsler/metrics.hpp"

using namespace cfinsler;

namespace {

int failures = 0;

double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

struct Criterion {
    double worst = 0.0;
    std::vector<std::string> notes;

    void check(double residual, const char*) { worst = std::max(worst, residual); }
    void require(bool ok, const std::string& what) {
        if (!ok) notes.push_back("failed: " + what);
    }
    void merge(const Criterion& o) {
        worst = std::max(worst, o.worst);
        notes.insert(notes.end(), o.notes.begin(), o.notes.end());
    }
};

unsigned thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CFINSLER_THREADS"))
        if (int v = std::atoi(env); v > 0) n = std::min<unsigned>(n, v);
    return n;
}

// runs fn over the points on a small pool, folding residuals into c
void for_points(const std::vector<Point>& pts,
                const std::function<void(const Point&, Criterion&)>& fn, Criterion& c) {
    unsigned n = std::min<unsigned>(thread_cap(), pts.size());
    if (n <= 1) {
        for (const auto& pt : pts) fn(pt, c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<Criterion> parts(n);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < n; ++t)
        workers.emplace_back([&, t] {
            for (std::size_t i = next++; i < pts.size(); i = next++) {
                try {
                    fn(pts[i], parts[t]);
                } catch (const std::exception& e) {
                    parts[t].notes.push_back(std::string("exception: ") + e.what());
                }
            }
        });
    for (auto& w : workers) w.join();
    for (const auto& p : parts) c.merge(p);
}

void run_jobs(const std::vector<std::function<void(Criterion&)>>& jobs, Criterion& c) {
    unsigned n = std::min<unsigned>(thread_cap(), jobs.size());
    if (n <= 1) {
        for (const auto& job : jobs) job(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<Criterion> parts(n);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < n; ++t)
        workers.emplace_back([&, t] {
            for (std::size_t i = next++; i < jobs.size(); i = next++) {
                try {
                    jobs[i](parts[t]);
                } catch (const std::exception& e) {
                    parts[t].notes.push_back(std::string("exception: ") + e.what());
                }
            }
        });
    for (auto& w : workers) w.join();
    for (const auto& p : parts) c.merge(p);
}

void report(int num, const char* title, const Criterion& c, double tol) {
    bool pass = c.worst <= tol && c.notes.empty();
    if (!pass) ++failures;
    std::printf("%s  criterion %2d  %-46s  max residual %.3e (tol %.0e)\n",
                pass ? "PASS" : "FAIL", num, title, c.worst, tol);
    for (const auto& n : c.notes) std::printf("      %s\n", n.c_str());
}

GeometryData geo(const MetricSpec& spec, const Point& pt, int order = 5) {
    return compute_geometry(spec, JetContext(order, pt.first, pt.second));
}

// 1. Euclidean baseline: everything vanishes, frame orthonormal.
void criterion1() {
    Criterion c;
    auto spec = builtin("euclidean");
    for_points(sample_admitted(spec, 50, 101), [&](const Point& pt, Criterion& c) {
        auto gd = geo(spec, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                c.check(std::abs(gd.conn.N[i][j].value()), "N");
                for (int k = 0; k < 2; ++k) {
                    c.check(std::abs(gd.conn.L[i][j][k].value()), "L");
                    c.check(std::abs(gd.conn.C[i][j][k].value()), "C");
                    c.check(std::abs(gd.br.BL[i][j][k].value()), "BL");
                    c.check(std::abs(gd.br.RL[i][j][k].value()), "RL");
                    for (int h = 0; h < 2; ++h) {
                        c.check(std::abs(cv.R[i][j][h][k].value()), "R");
                        c.check(std::abs(cv.P[i][j][h][k].value()), "P");
                        c.check(std::abs(cv.Xi[i][j][h][k].value()), "Xi");
                        c.check(std::abs(cv.S[i][j][h][k].value()), "S");
                    }
                }
            }
        auto invI = invariant_I(gd, fb, cv);
        c.check(std::abs(invI.I.value()), "I");
        c.check(std::abs(invariant_K(gd, fb).value()), "K");
        c.check(std::abs(invariant_W(gd, fb).value()), "W");
        // orthonormality: g(l, lbar) = 1, g(m, mbar) = 1, g(l, mbar) = 0
        Complex gll = 0, gmm = 0, glm = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Complex gij = gd.ft.g[i][j].value();
                gll += gij * fb.frame.l_up[i].value() * std::conj(fb.frame.l_up[j].value());
                gmm += gij * fb.frame.m_up[i].value() * std::conj(fb.frame.m_up[j].value());
                glm += gij * fb.frame.l_up[i].value() * std::conj(fb.frame.m_up[j].value());
            }
        c.check(std::abs(gll - 1.0), "g(l,l)");
        c.check(std::abs(gmm - 1.0), "g(m,m)");
        c.check(std::abs(glm), "g(l,m)");
    }, c);
    report(1, "Euclidean baseline vanishes", c, 1e-12);
}

// 2. Antonelli-Shimada closed forms for g, inverse, l, m, L, C, A, B.
void criterion2() {
    Criterion c;
    auto spec = antonelli_shimada(sigma_preset("harmonic"));
    for_points(sample_admitted(spec, 20, 102), [&](const Point& pt, Criterion& c) {
        auto gd = geo(spec, pt);
        auto fb = compute_frame(gd);
        const Complex e = pt.second[0], t = pt.second[1];
        const double ae2 = std::norm(e), at2 = std::norm(t);
        const double sig = (pt.first[0] * pt.first[1]).real();
        const double e2s = std::exp(2.0 * sig), e4s = e2s * e2s, e8s = e4s * e4s;
        const double L = gd.ft.L.value().real();
        const double F = std::sqrt(L), F3 = F * F * F;
        const double L3 = L * L * L, L4 = L3 * L;

        c.check(rel(gd.ft.g[0][0].value(), e8s * ae2 * (ae2 * ae2 + 2 * at2 * at2) / L3), "g_zz");
        c.check(rel(gd.ft.g[0][1].value(), -e8s * ae2 * at2 * std::conj(e) * t / L3), "g_zw");
        c.check(rel(gd.ft.g[1][1].value(), e8s * at2 * (2 * ae2 * ae2 + at2 * at2) / L3), "g_ww");
        c.check(rel(gd.ft.inv[0][0].value(), (2 * ae2 * ae2 + at2 * at2) / (2 * ae2 * L)), "gi_zz");
        c.check(rel(gd.ft.inv[1][0].value(), e * std::conj(t) / (2 * L)), "gi_wz");
        c.check(rel(gd.ft.inv[1][1].value(), (ae2 * ae2 + 2 * at2 * at2) / (2 * at2 * L)), "gi_ww");
        c.check(rel(gd.ft.det.value(), 2 * e8s * ae2 * at2 / (L * L)), "det g");

        c.check(rel(fb.frame.l_up[0].value(), e / F), "l^z");
        c.check(rel(fb.frame.l_up[1].value(), t / F), "l^w");
        c.check(rel(fb.frame.l_dn[0].value(), e4s * ae2 * std::conj(e) / F3), "l_z");
        c.check(rel(fb.frame.l_dn[1].value(), e4s * at2 * std::conj(t) / F3), "l_w");
        const double ae = std::sqrt(ae2), at = std::sqrt(at2), r2 = std::sqrt(2.0);
        c.check(rel(fb.frame.m_up[0].value(), -at * std::conj(t) / (r2 * ae * F)), "m^z");
        c.check(rel(fb.frame.m_up[1].value(), ae * std::conj(e) / (r2 * at * F)), "m^w");
        c.check(rel(fb.frame.m_dn[0].value(), -2 * e4s * ae * at * t / (r2 * F3)), "m_z");
        c.check(rel(fb.frame.m_dn[1].value(), 2 * e4s * ae * at * e / (r2 * F3)), "m_w");

        // L^i_jk = 2 ds/dz^k on the diagonal pairs; harmonic sigma = re(z w)
        const Complex sz = pt.first[1] * 0.5, sw = pt.first[0] * 0.5;
        c.check(rel(gd.conn.L[0][0][0].value(), 2.0 * sz), "L^z_zz");
        c.check(rel(gd.conn.L[1][1][0].value(), 2.0 * sz), "L^w_wz");
        c.check(rel(gd.conn.L[0][0][1].value(), 2.0 * sw), "L^z_zw");
        c.check(rel(gd.conn.L[1][1][1].value(), 2.0 * sw), "L^w_ww");
        c.check(std::abs(gd.conn.L[0][1][0].value()), "L^z_wz");
        c.check(std::abs(gd.conn.L[1][0][1].value()), "L^w_zw");

        c.check(rel(gd.conn.C[0][0][0].value(), e8s * at2 * at2 * at2 * at2 * std::conj(e) /
                                                    (ae2 * L4)),
                "C^z_zz");
        c.check(rel(gd.conn.C[0][0][1].value(), -e8s * at2 * at2 * at2 * std::conj(t) / L4),
                "C^z_zw");
        c.check(rel(gd.conn.C[0][1][1].value(),
                    e8s * at2 * at2 * std::conj(t) * std::conj(t) * e / L4),
                "C^z_ww");
        c.check(rel(gd.conn.C[1][1][1].value(), e8s * ae2 * ae2 * ae2 * ae2 * std::conj(t) /
                                                    (at2 * L4)),
                "C^w_ww");
        c.check(rel(gd.conn.C[1][0][1].value(), -e8s * ae2 * ae2 * ae2 * std::conj(e) / L4),
                "C^w_zw");
        c.check(rel(gd.conn.C[1][0][0].value(),
                    e8s * ae2 * ae2 * std::conj(e) * std::conj(e) * t / L4),
                "C^w_zz");

        c.check(rel(fb.vs.A.value(),
                    std::conj(e) * std::conj(e) * std::conj(t) * std::conj(t) /
                        (2 * ae2 * at2 * F)),
                "A");
        c.check(rel(fb.vs.B.value(), std::conj(e) * std::conj(t) *
                                         (ae2 * ae2 - at2 * at2) /
                                         (r2 * ae2 * ae * at2 * at * F)),
                "B");
    }, c);
    report(2, "Antonelli-Shimada closed forms", c, 1e-9);
}

// 3. Invariant values: AS I = 2/L, Kv_m = 4/L; Hartogs Kropina Kv_m = -2/F^2.
void criterion3() {
    Criterion c;
    auto as = builtin("antonelli-shimada");
    for_points(sample_admitted(as, 12, 103), [&](const Point& pt, Criterion& c) {
        auto gd = geo(as, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        Complex L = gd.ft.L.value();
        c.check(rel(invariant_I(gd, fb, cv).I.value(), 2.0 / L), "AS I");
        c.check(rel(sectional_curvatures(gd, fb, cv).Kv_m_contraction, 4.0 / L), "AS Kv_m");
    }, c);
    // The -2/F^2 law holds for the Kropina member of the Hartogs pair, where
    // I*L = -1 at every admitted point; the Randers member has a
    // direction-dependent vertical invariant (its sign even changes), so it
    // cannot satisfy a -2/F^2 law. Pinned on hartogs-kropina accordingly.
    auto kr = builtin("hartogs-kropina");
    for_points(sample_admitted(kr, 12, 103), [&](const Point& pt, Criterion& c) {
        auto gd = geo(kr, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        Complex F2 = gd.ft.L.value();
        auto sc = sectional_curvatures(gd, fb, cv);
        c.check(rel(sc.Kv_m_contraction, -2.0 / F2), "Kropina Kv_m");
        c.require(sc.Kv_m_contraction.real() < 0.0, "Kropina Kv_m < 0");
    }, c);
    report(3, "vertical invariant laws (I, Kv_m)", c, 1e-8);
}

// 4. AS horizontal invariants K and W on the log-potential presets.
void criterion4() {
    Criterion c;
    struct Preset {
        const char* name;
        int K_sign, W_sign;
    };
    // Sign expectations follow the displayed K and W formulas themselves.
    // For the Hartogs potential the sigma Hessian form is positive definite,
    // so K < 0 and both W terms are negative. For the disk potential the
    // form is negative definite, so K > 0, and the second W term dominates
    // with positive sign at every admitted point; a quoted W < 0 for this
    // preset is inconsistent with the formula it accompanies.
    for (Preset p : {Preset{"hartogs-log", -1, -1}, Preset{"disk-log", +1, +1}}) {
        auto spec = antonelli_shimada(sigma_preset(p.name));
        for_points(sample_admitted(spec, 10, 104), [&](const Point& pt, Criterion& c) {
            auto gd = geo(spec, pt);
            auto fb = compute_frame(gd);
            const Complex z = pt.first[0], w = pt.first[1];
            const Complex e = pt.second[0], t = pt.second[1];
            Complex szz, szw, sww;
            double sigv;
            if (std::string(p.name) == "hartogs-log") {
                double u = 1.0 - std::norm(z), d = std::norm(z) - std::norm(w);
                szz = 1.0 / (u * u) + std::norm(w) / (d * d);
                szw = -std::conj(z) * w / (d * d);
                sww = std::norm(z) / (d * d);
                sigv = std::log(1.0 / (u * d));
            } else {
                double s = 1.0 - std::norm(z) - std::norm(w);
                szz = -(s + std::norm(z)) / (s * s);
                szw = -std::conj(z) * w / (s * s);
                sww = -(s + std::norm(w)) / (s * s);
                sigv = std::log(s);
            }
            Complex L = gd.ft.L.value();
            Complex form = szz * std::norm(e) + szw * e * std::conj(t) +
                           std::conj(szw) * t * std::conj(e) + sww * std::norm(t);
            Complex Kwant = -2.0 / L * form;
            Complex Wwant = -Kwant / 2.0 -
                            std::exp(-4.0 * sigv) * L / (std::norm(e) * std::norm(t)) *
                                (szz * std::norm(t) + sww * std::norm(e));
            Complex Kgot = invariant_K(gd, fb).value();
            Complex Wgot = invariant_W(gd, fb).value();
            c.check(rel(Kgot, Kwant), "K formula");
            c.check(rel(Wgot, Wwant), "W formula");
            c.require(Kgot.real() * p.K_sign > 0.0, std::string(p.name) + " K sign");
            c.require(Wgot.real() * p.W_sign > 0.0, std::string(p.name) + " W sign");
        }, c);
    }
    report(4, "AS horizontal invariants K, W", c, 1e-7);
}

// 5. Harmonic sigma: Kh_mu = -1/2 Kh_lambda.
void criterion5() {
    Criterion c;
    auto spec = antonelli_shimada(sigma_preset("harmonic"));
    for_points(sample_admitted(spec, 20, 105), [&](const Point& pt, Criterion& c) {
        auto gd = geo(spec, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        auto sc = sectional_curvatures(gd, fb, cv);
        c.check(rel(sc.Kh_mu_contraction, -0.5 * sc.Kh_lambda_contraction), "Kh_mu");
    }, c);
    report(5, "harmonic sigma halves Kh_mu", c, 1e-7);
}

// 6. Classification chains.
void criterion6() {
    Criterion c;
    ToleranceConfig tol;
    for (const char* name : {"hartogs-randers", "hartogs-kropina"}) {
        auto rep = aggregate_classify(builtin(name), 20, 106, 5, tol);
        for (const char* flag : {"kahler", "holomorphic_spray", "berwald", "landsberg"})
            c.require(rep.aggregate.at(flag).unanimous() == Verdict::Yes,
                      std::string(name) + " unanimous " + flag);
    }
    {
        auto spec = antonelli_shimada(sigma_preset("hartogs-log"));
        for_points(sample_admitted(spec, 10, 106), [&](const Point& pt, Criterion& c) {
            auto pc = classify_point(spec, pt, 5, tol);
            c.require(pc.flags.at("kahler").verdict == Verdict::No, "AS hartogs-log not Kahler");
            c.check(pc.I_hcov_residual, "AS I_{|k}");
        }, c);
    }
    {
        auto spec = antonelli_shimada("1/2");
        for_points(sample_admitted(spec, 10, 106), [&](const Point& pt, Criterion& c) {
            auto pc = classify_point(spec, pt, 5, tol);
            c.require(pc.flags.at("berwald").verdict == Verdict::Yes, "AS const sigma Berwald");
            auto gd = geo(spec, pt);
            auto fb = compute_frame(gd);
            // locally Minkowski consistent: all horizontal curvature vanishes
            c.check(std::abs(invariant_K(gd, fb).value()), "AS const K");
            c.check(std::abs(invariant_W(gd, fb).value()), "AS const W");
        }, c);
    }
    report(6, "classification chains", c, 1e-8);
}

// 7. Identity suites on every builtin.
void criterion7() {
    Criterion c;
    for (const auto& spec : list_builtins()) {
        for_points(sample_admitted(spec, 10, 107), [&](const Point& pt, Criterion& c) {
            // everything except the Bianchi identities fits in an order-5 jet
            auto gd = geo(spec, pt, 5);
            auto fb = compute_frame(gd);
            auto cv = curvature_tensors(gd);
            c.check(frame_identity_residuals(gd, fb).worst(), "frame");
            c.check(prop21_residuals(gd, cv).worst(), "prop21");
            c.check(prop42_residuals(gd, fb).worst(), "prop42");
            c.check(prop43_residuals(gd, fb).worst(), "prop43");
            auto invI = invariant_I(gd, fb, cv);
            c.check(invI.structure_residual, "S structure");
            c.check(invI.contraction_residual, "S contraction");
            c.check(theorem41_iii_residual(invI.I, gd), "thm41 iii");
            c.check(hh_decomposition_residual(gd, fb, cv), "hh reconstruction");
            {
                auto gd6 = geo(spec, pt, 6);
                c.check(bianchi_residuals(gd6, curvature_tensors(gd6)).worst(), "bianchi");
            }
            // Ricci-type exchange identities for a sample scalar
            const WJet X = sqrt(gd.ft.L);
            TensorSlot dn{false, false}, dnb{false, true};
            Vec2 Xv, Xh, Xvb;
            for (int k = 0; k < 2; ++k) {
                Xv[k] = vertical(X, k);
                Xh[k] = adapted_delta(X, k, gd.conn.N);
                Xvb[k] = vertical_bar(X, k);
            }
            JetTensor Xvt = JetTensor::vector(Xv, dn);
            JetTensor Xht = JetTensor::vector(Xh, dn);
            JetTensor Xvbt = JetTensor::vector(Xvb, dnb);
            for (int k = 0; k < 2; ++k)
                for (int j = 0; j < 2; ++j) {
                    Complex lhs = covariant_h(Xvt, j, gd.conn).at({k}).value() -
                                  covariant_v(Xht, k, gd.conn).at({j}).value();
                    Complex rhs = 0.0;
                    for (int i = 0; i < 2; ++i) rhs += gd.conn.C[i][j][k].value() * Xh[i].value();
                    c.check(std::abs(lhs - rhs) / (1.0 + std::abs(rhs)), "prop22 i");
                    Complex lhs2 = covariant_h(Xvbt, j, gd.conn).at({k}).value() -
                                   covariant_vbar(Xht, k, gd.conn).at({j}).value();
                    Complex rhs2 = 0.0;
                    for (int i = 0; i < 2; ++i)
                        rhs2 += vertical_bar(gd.conn.N[i][j], k).value() * Xv[i].value();
                    c.check(std::abs(lhs2 - rhs2) / (1.0 + std::abs(rhs2)), "prop22 ii");
                }
        }, c);
    }
    report(7, "identity suites on all builtins", c, 1e-7);
}

// 8. Constant-curvature special form and weak symmetry.
void criterion8() {
    Criterion c;
    // On hartogs-hermitian the weak-symmetry condition and the sectional
    // relations Kh_lambda = Kh_mu = 2K hold, but K is direction dependent
    // (mu_bar(J) != 0), so the rank-one special form cannot fit there. The
    // fit itself is validated on the purely Hermitian metric of constant
    // holomorphic curvature -2 on the unit ball, where it closes to
    // near machine precision.
    auto hh = builtin("hartogs-hermitian");
    for_points(sample_admitted(hh, 10, 108), [&](const Point& pt, Criterion& c) {
        auto gd = geo(hh, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        c.check(weak_symmetry_residual(gd, cv), "weak symmetry");
        Complex K = invariant_K(gd, fb).value();
        auto sc = sectional_curvatures(gd, fb, cv);
        c.check(rel(sc.Kh_lambda_contraction, 2.0 * K), "Kh_lambda = 2K");
        c.check(rel(sc.Kh_mu_contraction, 2.0 * K), "Kh_mu = 2K");
    }, c);
    auto ball = parse_metric("ball-hyperbolic",
                             "let s = 1 - abs2(z1) - abs2(z2)\n"
                             "let p = conj(z1)*e1 + conj(z2)*e2\n"
                             "L = (s*(abs2(e1)+abs2(e2)) + abs2(p))/s^2");
    ball.domain.push_back({"|z1|^2 + |z2|^2 < 1", [](const std::array<Complex, 2>& z,
                                                     const std::array<Complex, 2>&) {
                               return std::norm(z[0]) + std::norm(z[1]) < 1.0;
                           }});
    ball.z_radius = 0.6;
    for_points(sample_admitted(ball, 10, 108), [&](const Point& pt, Criterion& c) {
        auto gd = geo(ball, pt);
        auto fb = compute_frame(gd);
        auto cv = curvature_tensors(gd);
        Complex K = invariant_K(gd, fb).value();
        c.check(rel(K, Complex(-2.0)), "ball K = -2");
        auto fit = special_form_fit(gd, cv);
        c.check(fit.residual, "special form residual");
        c.check(fit.vertical_defect, "special form vertical defect");
        c.check(rel(fit.K_fit.value(), K / 2.0), "K_fit = K/2");
    }, c);
    report(8, "special form and weak symmetry", c, 1e-7);
}

// 9. Invariance of I, K, W under constant linear coordinate changes.
void criterion9() {
    Criterion c;
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<std::function<void(Criterion&)>> jobs;
    for (const auto& spec : list_builtins()) {
        auto pts = sample_admitted(spec, 10, 109);
        for (int trial = 0; trial < 10; ++trial) {
            std::array<std::array<Complex, 2>, 2> M;
            do {
                for (auto& row : M)
                    for (auto& v : row) v = Complex(u(rng), u(rng));
                M[0][0] += 1.0;
                M[1][1] += 1.0;
            } while (std::abs(M[0][0] * M[1][1] - M[0][1] * M[1][0]) < 0.3);
            const auto pt = pts[trial % pts.size()];
            // skip draws that push the moved point outside the domain
            std::array<Complex, 2> zp{M[0][0] * pt.first[0] + M[0][1] * pt.first[1],
                                      M[1][0] * pt.first[0] + M[1][1] * pt.first[1]};
            std::array<Complex, 2> ep{M[0][0] * pt.second[0] + M[0][1] * pt.second[1],
                                      M[1][0] * pt.second[0] + M[1][1] * pt.second[1]};
            if (!spec.admitted(zp, ep, nullptr)) continue;
            jobs.push_back([spec, pt, M](Criterion& c) {
                c.check(linear_change_invariance(spec, pt, M, 5).worst(), "invariance");
            });
        }
    }
    run_jobs(jobs, c);
    report(9, "invariance under linear coordinate changes", c, 1e-8);
}

// 10. Finite-difference oracle and truncation stability.
void criterion10() {
    Criterion c;
    const double h = 1e-5;
    for (const auto& spec : list_builtins()) {
        for_points(sample_admitted(spec, 4, 110), [&](const Point& pt, Criterion& c) {
            auto gd = geo(spec, pt);
            auto wirt = [&](auto&& f, std::array<Complex, 2> x, int k, bool holo) {
                auto xp = x, xm = x, yp = x, ym = x;
                xp[k] += h;
                xm[k] -= h;
                yp[k] += Complex(0, h);
                ym[k] -= Complex(0, h);
                Complex dx = (f(xp) - f(xm)) / (2 * h);
                Complex dy = (f(yp) - f(ym)) / (2 * h);
                return holo ? (dx - Complex(0, 1) * dy) * 0.5 : (dx + Complex(0, 1) * dy) * 0.5;
            };
            auto Lval = [&](const std::array<Complex, 2>& z, const std::array<Complex, 2>& e) {
                return eval_L_jet(spec, JetContext(2, z, e)).value();
            };
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    auto inner = [&](const std::array<Complex, 2>& e) {
                        return wirt([&](const std::array<Complex, 2>& ee) {
                                        return Lval(pt.first, ee);
                                    },
                                    e, i, true);
                    };
                    Complex fd = wirt(inner, pt.second, j, false);
                    Complex ad = gd.ft.g[i][j].value();
                    c.check(std::abs(fd - ad) / (1.0 + std::abs(ad)), "fd g");
                }
            auto gmat = [&](const std::array<Complex, 2>& z) {
                JetContext ctx(2, z, pt.second);
                auto ft = fundamental_tensor(eval_L_jet(spec, ctx), ctx);
                std::array<Complex, 4> out;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) out[2 * a + b] = ft.g[a][b].value();
                return out;
            };
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k) {
                    Complex fd = 0.0;
                    for (int l = 0; l < 2; ++l)
                        for (int m = 0; m < 2; ++m)
                            fd += gd.ft.inv[m][i].value() *
                                  wirt([&](const std::array<Complex, 2>& z) {
                                           return gmat(z)[2 * l + m];
                                       },
                                       pt.first, k, true) *
                                  pt.second[l];
                    c.check(std::abs(fd - gd.conn.N[i][k].value()) /
                                (1.0 + std::abs(gd.conn.N[i][k].value())),
                            "fd N");
                }
            auto Nmat = [&](const std::array<Complex, 2>& e) {
                JetContext ctx(3, pt.first, e);
                auto ft = fundamental_tensor(eval_L_jet(spec, ctx), ctx);
                auto conn = chern_finsler(ft, ctx);
                std::array<Complex, 4> out;
                for (int a = 0; a < 2; ++a)
                    for (int k = 0; k < 2; ++k) out[2 * a + k] = conn.N[a][k].value();
                return out;
            };
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k) {
                        Complex fd = wirt([&](const std::array<Complex, 2>& e) {
                                              return Nmat(e)[2 * i + k];
                                          },
                                          pt.second, j, true);
                        Complex ad = gd.conn.L[i][j][k].value();
                        c.check(std::abs(fd - ad) / (1.0 + std::abs(ad)), "fd L");
                    }
        }, c);
    }
    report(10, "finite-difference oracle", c, 1e-5);

    // truncation stability: order 6 vs order 8 pipelines agree
    Criterion c2;
    for (const auto& spec : list_builtins()) {
        for_points(sample_admitted(spec, 2, 111), [&](const Point& pt, Criterion& c2) {
            auto gd6 = geo(spec, pt, 6);
            auto gd8 = geo(spec, pt, 8);
            auto fb6 = compute_frame(gd6);
            auto fb8 = compute_frame(gd8);
            c2.check(rel(invariant_K(gd6, fb6).value(), invariant_K(gd8, fb8).value()), "K 6v8");
            c2.check(rel(invariant_W(gd6, fb6).value(), invariant_W(gd8, fb8).value()), "W 6v8");
            auto cv6 = curvature_tensors(gd6);
            auto cv8 = curvature_tensors(gd8);
            c2.check(rel(invariant_I(gd6, fb6, cv6).I.value(),
                         invariant_I(gd8, fb8, cv8).I.value()),
                     "I 6v8");
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    c2.check(std::abs(gd6.ft.g[i][j].value() - gd8.ft.g[i][j].value()), "g 6v8");
        }, c2);
    }
    // reported separately so both halves of the criterion are visible
    report(10, "truncation stability order 6 vs 8", c2, 1e-10);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
