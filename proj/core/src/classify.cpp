#include "cfinsler/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "cfinsler/errors.hpp"

namespace cfinsler {

namespace {

Complex v(const WJet& x) { return x.value(); }

WJet hcov0(const WJet& X, const GeometryData& gd) {
    WJet out(gd.ctx.order, Complex(0.0));
    for (int k = 0; k < 2; ++k)
        out += adapted_delta(X, k, gd.conn.N) * gd.seeds.eta[k];
    return out;
}

Verdict band(double residual, double tol, double margin) {
    if (residual <= tol) return Verdict::Yes;
    if (residual >= margin * tol) return Verdict::No;
    return Verdict::Indeterminate;
}

Verdict conjunction(Verdict a, Verdict b) {
    if (a == Verdict::No || b == Verdict::No) return Verdict::No;
    if (a == Verdict::Yes && b == Verdict::Yes) return Verdict::Yes;
    return Verdict::Indeterminate;
}

int thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CFINSLER_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(n));
    }
    return static_cast<int>(hw);
}

}  // namespace

double ToleranceConfig::tol_for(const std::string& flag) const {
    auto it = overrides.find(flag);
    return it == overrides.end() ? pass_tol : it->second;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        default: return "indeterminate";
    }
}

const std::vector<std::string>& classification_flags() {
    static const std::vector<std::string> names = {
        "purely_hermitian", "weakly_kahler", "kahler",     "holomorphic_spray", "berwald",
        "landsberg",        "g_landsberg",   "weak_symmetry", "special_form"};
    return names;
}

PointClassification classify_point(const MetricSpec& spec, const Point& pt, int order,
                                   const ToleranceConfig& tol) {
    if (tol.pass_tol <= 0.0) throw DomainViolation("pass_tol must be positive");
    if (tol.fail_margin <= 1.0) throw DomainViolation("fail_margin must exceed 1");

    GeometryData gd = compute_geometry(spec, JetContext(order, pt.first, pt.second));
    FrameBundle fb = compute_frame(gd);
    CurvatureTensors cv = curvature_tensors(gd);
    const auto& fr = fb.frame;
    const auto& hs = fb.hs;
    const WJet& A = fb.vs.A;
    const WJet& B = fb.vs.B;
    const WJet& F = fr.F;
    const double m = tol.fail_margin;

    PointClassification out;
    out.point = pt;

    auto set = [&](const std::string& name, double residual, const std::string& witness) {
        out.flags[name] = {band(residual, tol.tol_for(name), m), residual, witness};
    };

    {  // purely Hermitian: all vertical torsion vanishes
        double worst = std::abs(v(A));
        std::string wit = "A";
        double gscale = 1.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) gscale = std::max(gscale, std::abs(v(gd.ft.g[i][j])));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    double r = std::abs(v(gd.conn.C[i][j][k])) / gscale;
                    if (r > worst) {
                        worst = r;
                        wit = "C^" + std::to_string(i + 1) + "_" + std::to_string(j + 1) +
                              std::to_string(k + 1);
                    }
                }
        set("purely_hermitian", worst, wit);
    }

    auto kt = kahler_scalar_test(hs);
    set("weakly_kahler", kt.uv_residual, "U-V");
    set("kahler", std::max(kt.uv_residual, kt.ye_residual),
        kt.uv_residual >= kt.ye_residual ? "U-V" : "Y-E");

    {  // holomorphic spray: d._kbar G^i = 0
        double gs = 1.0, worst = 0.0;
        for (int i = 0; i < 2; ++i) gs = std::max(gs, std::abs(v(gd.spray.G[i])));
        std::string wit = "dGbar";
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                worst = std::max(worst, std::abs(v(gd.spray.Gbar[i][k])) / gs);
        set("holomorphic_spray", worst, wit);
    }

    out.flags["berwald"] = {
        conjunction(out.flags["kahler"].verdict, out.flags["holomorphic_spray"].verdict),
        std::max(out.flags["kahler"].residual, out.flags["holomorphic_spray"].residual),
        "kahler & holomorphic_spray"};

    {  // Landsberg: F A (E-Y) = A_{|0} - F A (J+Y) and the B analogue
        WJet JY = hs.J + hs.Y;
        WJet EY = hs.E - hs.Y;
        Complex ra_l = v(F * A * EY), ra_r = v(hcov0(A, gd) - F * A * JY);
        Complex rb_l = v(F * B * EY), rb_r = v(hcov0(B, gd) - F * B * JY * 0.5);
        double sa = std::max({1.0, std::abs(ra_l), std::abs(ra_r)});
        double sb = std::max({1.0, std::abs(rb_l), std::abs(rb_r)});
        double ra = std::abs(ra_l - ra_r) / sa;
        double rb = std::abs(rb_l - rb_r) / sb;
        set("landsberg", std::max(ra, rb), ra >= rb ? "A relation" : "B relation");
    }

    out.flags["g_landsberg"] = {
        conjunction(out.flags["landsberg"].verdict, out.flags["holomorphic_spray"].verdict),
        std::max(out.flags["landsberg"].residual, out.flags["holomorphic_spray"].residual),
        "landsberg & holomorphic_spray"};

    set("weak_symmetry", weak_symmetry_residual(gd, cv), "R_0k00 - R_000k");

    {
        auto fit = special_form_fit(gd, cv);
        set("special_form", std::max(fit.residual, fit.vertical_defect), "(K/2)(gg+gg) fit");
    }

    {  // trichotomy of the vertical torsion scalars
        double a = std::abs(v(A)), b = std::abs(v(B));
        double t = tol.tol_for("trichotomy");
        WJet JY = hs.J + hs.Y;
        WJet VH = hs.V + hs.H;
        WJet invF = reciprocal(F);
        if (a <= t) {
            out.trichotomy = "purely-hermitian";
            out.trichotomy_residual = a;
        } else if (a >= m * t && b <= t) {
            Complex r1 = v(op_m(fr, JY) - invF * VH);
            Complex r2 = v(op_m(fr, VH) + A * JY);
            out.trichotomy = "A!=0,B=0";
            out.trichotomy_residual = std::max(std::abs(r1), std::abs(r2)) /
                                      std::max(1.0, std::abs(v(JY)) + std::abs(v(VH)));
        } else if (a >= m * t && b >= m * t) {
            double scale = std::max(1.0, std::abs(v(JY)) + std::abs(v(VH)));
            Complex r1 = v(F * op_l(fr, JY) - JY * 0.5);
            Complex r2 = v(F * op_l(fr, VH) + VH * 0.5);
            double worst = std::max(std::abs(r1), std::abs(r2)) / scale;
            WJet cl = B * JY * 0.5 + op_m(fr, JY) - invF * VH;
            WJet cm = B * VH + op_m(fr, VH) + A * JY;
            for (int k = 0; k < 2; ++k) {
                Complex lhs = v(adapted_delta(B, k, gd.conn.N));
                Complex rhs = v(cl * fr.l_dn[k] + cm * fr.m_dn[k]);
                worst = std::max(worst,
                                 std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
            }
            out.trichotomy = "AB^2!=0";
            out.trichotomy_residual = worst;
        } else {
            out.trichotomy = "indeterminate";
            out.trichotomy_residual = std::min(a, b);
        }
    }

    {
        auto invI = invariant_I(gd, fb, cv);
        out.I = v(invI.I);
        out.I_hcov_residual = invariant_I_hcov_residual(invI.I, gd);
        out.K = v(invariant_K(gd, fb));
        out.W = v(invariant_W(gd, fb));
    }

    // inclusion-chain consistency
    auto yes = [&](const char* f) { return out.flags[f].verdict == Verdict::Yes; };
    auto no = [&](const char* f) { return out.flags[f].verdict == Verdict::No; };
    auto imply = [&](const char* p, const char* q) {
        if (yes(p) && no(q))
            out.inconsistencies.push_back(std::string(p) + " without " + q);
    };
    imply("berwald", "kahler");
    imply("kahler", "weakly_kahler");
    imply("berwald", "g_landsberg");
    imply("g_landsberg", "landsberg");
    if (yes("purely_hermitian") &&
        (std::abs(v(A)) > tol.tol_for("purely_hermitian") ||
         std::abs(v(B)) > tol.tol_for("purely_hermitian")))
        out.inconsistencies.push_back("purely_hermitian with nonzero A or B");
    return out;
}

Verdict AggregateFlag::unanimous() const {
    if (yes > 0 && no == 0 && indeterminate == 0) return Verdict::Yes;
    if (no > 0 && yes == 0 && indeterminate == 0) return Verdict::No;
    return Verdict::Indeterminate;
}

double AggregateFlag::fraction_yes() const {
    int total = yes + no + indeterminate;
    return total == 0 ? 0.0 : static_cast<double>(yes) / total;
}

ClassificationReport aggregate_classify(const MetricSpec& spec, int count, std::uint64_t seed,
                                        int order, const ToleranceConfig& tol) {
    std::vector<Point> pts = sample_admitted(spec, count, seed);
    if (static_cast<int>(pts.size()) < count)
        throw DomainViolation("sampler produced too few admitted points for " + spec.name);

    ClassificationReport rep;
    rep.points.resize(pts.size());
    int workers = std::min<int>(thread_cap(), static_cast<int>(pts.size()));
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= pts.size()) return;
            try {
                rep.points[i] = classify_point(spec, pts[i], order, tol);
            } catch (...) {
                std::lock_guard<std::mutex> lk(fail_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (const auto& p : rep.points)
        for (const auto& [name, fr] : p.flags) {
            auto& agg = rep.aggregate[name];
            switch (fr.verdict) {
                case Verdict::Yes: ++agg.yes; break;
                case Verdict::No: ++agg.no; break;
                default: ++agg.indeterminate; break;
            }
            agg.worst_residual = std::max(agg.worst_residual, fr.residual);
        }
    return rep;
}

double InvarianceResiduals::worst() const { return std::max(I, std::max(K, W)); }

InvarianceResiduals linear_change_invariance(const MetricSpec& spec, const Point& pt,
                                             const std::array<std::array<Complex, 2>, 2>& M,
                                             int order) {
    Complex det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (std::abs(det) < 1e-14) throw DomainViolation("coordinate change matrix is singular");
    std::array<std::array<Complex, 2>, 2> inv{
        {{M[1][1] / det, -M[0][1] / det}, {-M[1][0] / det, M[0][0] / det}}};

    auto invariants = [order](const MetricSpec& s, const Point& p) {
        GeometryData gd = compute_geometry(s, JetContext(order, p.first, p.second));
        FrameBundle fb = compute_frame(gd);
        CurvatureTensors cv = curvature_tensors(gd);
        return std::array<Complex, 3>{v(invariant_I(gd, fb, cv).I), v(invariant_K(gd, fb)),
                                      v(invariant_W(gd, fb))};
    };

    auto base = invariants(spec, pt);

    MetricSpec prime = spec;
    prime.name = spec.name + "-pulled-back";
    prime.pullback = inv;
    Point moved{{M[0][0] * pt.first[0] + M[0][1] * pt.first[1],
                 M[1][0] * pt.first[0] + M[1][1] * pt.first[1]},
                {M[0][0] * pt.second[0] + M[0][1] * pt.second[1],
                 M[1][0] * pt.second[0] + M[1][1] * pt.second[1]}};
    auto primed = invariants(prime, moved);

    auto rel = [](Complex a, Complex b) {
        return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
    };
    return {rel(base[0], primed[0]), rel(base[1], primed[1]), rel(base[2], primed[2])};
}

}  // namespace cfinsler
