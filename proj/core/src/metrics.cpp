#include "cfinsler/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "cfinsler/errors.hpp"

namespace cfinsler {

namespace {

using Z = std::array<Complex, 2>;

double hartogs_alpha2(const Z& z, const Z& eta, Complex* beta_out = nullptr) {
    double d = std::norm(z[0]) - std::norm(z[1]);
    Complex beta = (z[1] * eta[0] - z[0] * eta[1]) / d;
    if (beta_out) *beta_out = beta;
    double q = 1.0 - std::norm(z[0]);
    return std::norm(eta[0]) / (q * q) + std::norm(beta);
}

DomainConstraint hartogs_triangle() {
    return {"|z2| < |z1| < 1",
            [](const Z& z, const Z&) { return std::abs(z[1]) < std::abs(z[0]) && std::abs(z[0]) < 1.0; }};
}

DomainConstraint beta_nonzero() {
    return {"beta(z,eta) != 0 (guard |beta| > 1e-8 alpha)", [](const Z& z, const Z& eta) {
                Complex beta;
                double a2 = hartogs_alpha2(z, eta, &beta);
                return std::abs(beta) > 1e-8 * std::sqrt(a2);
            }};
}

const char* kHartogsLets =
    "let d = abs2(z1) - abs2(z2)\n"
    "let b = (z2*e1 - z1*e2)/d\n"
    "let q = 1 - abs2(z1)\n"
    "let a2 = abs2(e1)/q^2 + abs2(b)\n";

MetricSpec make(const std::string& name, const std::string& source) {
    MetricSpec m;
    m.name = name;
    m.source = source;
    m.program = dsl::parse(source);
    return m;
}

bool hartogs_guard(const Z& z, const Z& eta) {
    double az = std::abs(z[0]);
    if (!(az < 0.9 && az > 0.15 && std::abs(z[1]) < 0.8 * az)) return false;
    Complex beta;
    double a2 = hartogs_alpha2(z, eta, &beta);
    // the Randers/Kropina members are ill-conditioned where |beta| << alpha,
    // so sampling keeps a healthy angle between eta and the singular set
    return std::abs(beta) > 0.25 * std::sqrt(a2);
}

MetricSpec make_hartogs(const std::string& name, const std::string& l_line, bool needs_beta) {
    MetricSpec m = make(name, std::string(kHartogsLets) + l_line);
    m.domain.push_back(hartogs_triangle());
    if (needs_beta) m.domain.push_back(beta_nonzero());
    m.sample_guard = hartogs_guard;
    return m;
}

}  // namespace

bool MetricSpec::admitted(const std::array<Complex, 2>& z, const std::array<Complex, 2>& eta,
                          std::string* why) const {
    std::array<Complex, 2> zz = z, ee = eta;
    if (pullback) {
        const auto& P = *pullback;
        zz = {P[0][0] * z[0] + P[0][1] * z[1], P[1][0] * z[0] + P[1][1] * z[1]};
        ee = {P[0][0] * eta[0] + P[0][1] * eta[1], P[1][0] * eta[0] + P[1][1] * eta[1]};
    }
    for (const auto& c : domain) {
        if (!c.admits(zz, ee)) {
            if (why) *why = c.description;
            return false;
        }
    }
    return true;
}

std::string sigma_preset(const std::string& name) {
    if (name == "0" || name.empty()) return "0";
    if (name == "hartogs-log") return "log(1/((1 - abs2(z1))*(abs2(z1) - abs2(z2))))";
    if (name == "disk-log") return "log(1 - abs2(z1) - abs2(z2))";
    if (name == "harmonic") return "re(z1*z2)";
    throw DomainViolation("unknown sigma preset '" + name + "'");
}

MetricSpec antonelli_shimada(const std::string& sigma_expr) {
    MetricSpec m = make("antonelli-shimada",
                        "let s = " + sigma_expr + "\n"
                        "L = exp(2*s) * sqrt(abs2(e1)^2 + abs2(e2)^2)");
    m.domain.push_back({"eta1 != 0 and eta2 != 0", [](const Z&, const Z& eta) {
                            return std::abs(eta[0]) > 0.0 && std::abs(eta[1]) > 0.0;
                        }});
    m.sample_guard = [](const Z& z, const Z& eta) {
        // keep sigma presets with log singularities well-defined too
        double s = std::norm(z[0]) + std::norm(z[1]);
        return std::abs(eta[0]) > 1e-2 && std::abs(eta[1]) > 1e-2 && s < 0.8 &&
               std::abs(z[1]) < 0.8 * std::abs(z[0]) && std::abs(z[0]) > 0.15;
    };
    m.z_radius = 0.85;
    return m;
}

MetricSpec builtin(const std::string& name) {
    if (name == "euclidean") return make("euclidean", "L = abs2(e1) + abs2(e2)");
    if (name == "antonelli-shimada") return antonelli_shimada("0");
    if (name == "hartogs-hermitian") return make_hartogs(name, "L = a2", false);
    if (name == "hartogs-randers")
        return make_hartogs(name, "L = (sqrt(a2) + sqrt(abs2(b)))^2", true);
    if (name == "hartogs-kropina") return make_hartogs(name, "L = a2^2 / abs2(b)", true);
    throw DomainViolation("unknown builtin metric '" + name + "'");
}

bool is_builtin(const std::string& name) {
    static const char* names[] = {"euclidean", "antonelli-shimada", "hartogs-hermitian",
                                  "hartogs-randers", "hartogs-kropina"};
    for (auto* n : names)
        if (name == n) return true;
    return false;
}

std::vector<MetricSpec> list_builtins() {
    return {builtin("euclidean"), builtin("antonelli-shimada"), builtin("hartogs-hermitian"),
            builtin("hartogs-randers"), builtin("hartogs-kropina")};
}

MetricSpec parse_metric(const std::string& name, const std::string& text) {
    return make(name, text);
}

WJet eval_L_jet(const MetricSpec& spec, const JetContext& ctx) {
    std::string why;
    if (!spec.admitted(ctx.z, ctx.eta, &why))
        throw DomainViolation("point outside domain of " + spec.name + ": " + why);
    WJet L;
    if (spec.pullback) {
        const auto& P = *spec.pullback;
        Seeds s = seed(ctx);
        dsl::Env env;
        env["z1"] = P[0][0] * s.z[0] + P[0][1] * s.z[1];
        env["z2"] = P[1][0] * s.z[0] + P[1][1] * s.z[1];
        env["e1"] = P[0][0] * s.eta[0] + P[0][1] * s.eta[1];
        env["e2"] = P[1][0] * s.eta[0] + P[1][1] * s.eta[1];
        L = dsl::eval(spec.program, env);
    } else {
        L = dsl::eval(spec.program, seed(ctx));
    }
    Complex L0 = L.value();
    if (std::abs(L0.imag()) > 1e-9 * (1.0 + std::abs(L0.real())))
        throw DomainViolation("L is not real at base point (Im = " + std::to_string(L0.imag()) + ")");
    if (!(L0.real() > 0.0)) throw DomainViolation("L is not positive at base point");
    return L;
}

double HomogeneityReport::worst() const {
    return std::max(std::max(euler_L, euler_g), std::max(L_equals_g, scaling));
}

HomogeneityReport validate_homogeneity(const MetricSpec& spec, const JetContext& ctx, int trials,
                                       std::uint64_t rng_seed) {
    JetContext c(std::max(ctx.order, 3), ctx.z, ctx.eta);
    WJet L = eval_L_jet(spec, c);
    Seeds s = seed(c);
    double Lscale = std::abs(L.value());

    // (1,0)-homogeneity in eta: the holomorphic Euler operator reproduces L
    WJet euler(c.order, Complex(0.0));
    for (int k = 0; k < 2; ++k) euler += L.derivative(Var(kE1 + k)) * s.eta[k];
    double r1 = std::abs((euler - L).value()) / (1.0 + Lscale);

    double r2 = 0.0;
    Complex quad(0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            WJet gij = L.derivative(Var(kE1 + i)).derivative(Var(kEb1 + j));
            WJet eg(c.order, Complex(0.0));
            for (int k = 0; k < 2; ++k) eg += gij.derivative(Var(kE1 + k), "euler of g") * s.eta[k];
            r2 = std::max(r2, std::abs(eg.value()) / (1.0 + std::abs(gij.value())));
            quad += gij.value() * c.eta[i] * std::conj(c.eta[j]);
        }
    double r3 = std::abs(L.value() - quad) / (1.0 + Lscale);

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> mag(0.3, 2.0), arg(0.0, 6.283185307179586);
    double F = std::sqrt(L.value().real());
    double r4 = 0.0;
    for (int t = 0; t < trials; ++t) {
        Complex lambda = std::polar(mag(rng), arg(rng));
        std::array<Complex, 2> se{lambda * c.eta[0], lambda * c.eta[1]};
        WJet Ls = dsl::eval(spec.program, seed(JetContext(2, c.z, se)));
        double Fs = std::sqrt(std::abs(Ls.value().real()));
        r4 = std::max(r4, std::abs(Fs - std::abs(lambda) * F) / (1.0 + F));
    }
    return {r1, r2, r3, r4};
}

std::vector<Point> sample_admitted(const MetricSpec& spec, int n, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&](double radius) {
        for (;;) {
            Complex c(u(rng), u(rng));
            if (std::abs(c) <= 1.0) return c * radius;
        }
    };
    std::vector<Point> out;
    long budget = 1000L * n;
    while (static_cast<int>(out.size()) < n && budget-- > 0) {
        Z z{draw(spec.z_radius), draw(spec.z_radius)};
        Z eta{draw(1.5), draw(1.5)};
        if (std::abs(eta[0]) < 1e-3 && std::abs(eta[1]) < 1e-3) continue;
        if (spec.sample_guard && !spec.sample_guard(z, eta)) continue;
        if (!spec.admitted(z, eta)) continue;
        out.push_back({z, eta});
    }
    if (static_cast<int>(out.size()) < n)
        throw DomainViolation("could not sample admitted points for " + spec.name);
    return out;
}

}  // namespace cfinsler
