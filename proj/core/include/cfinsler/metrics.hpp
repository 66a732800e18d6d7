#pragma once

// Built-in metric functions plus user-defined ones from DSL text, with
// per-metric domain validation and homogeneity checks.

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cfinsler/dsl.hpp"
#include "cfinsler/jets.hpp"

namespace cfinsler {

using Point = std::pair<std::array<Complex, 2>, std::array<Complex, 2>>;  // (z, eta)

struct DomainConstraint {
    std::string description;
    std::function<bool(const std::array<Complex, 2>& z, const std::array<Complex, 2>& eta)> admits;
};

struct MetricSpec {
    std::string name;
    std::string source;  // DSL text
    dsl::Program program;
    std::vector<DomainConstraint> domain;
    // stricter guard used when drawing sample points, so randomly drawn
    // points stay clear of domain boundaries and degeneracies
    std::function<bool(const std::array<Complex, 2>&, const std::array<Complex, 2>&)> sample_guard;
    double z_radius = 0.9;  // sampling radius for base coordinates
    // optional constant linear substitution: when set, the metric evaluates
    // as L(P z, P eta); used for coordinate-change experiments
    std::optional<std::array<std::array<Complex, 2>, 2>> pullback;

    bool admitted(const std::array<Complex, 2>& z, const std::array<Complex, 2>& eta,
                  std::string* why = nullptr) const;
};

std::vector<MetricSpec> list_builtins();
MetricSpec builtin(const std::string& name);
bool is_builtin(const std::string& name);

/// Antonelli-Shimada with a caller-chosen conformal factor expression in
/// z1, z2 and their conjugates.
MetricSpec antonelli_shimada(const std::string& sigma_expr);

/// Named conformal factor presets: "0", "hartogs-log", "disk-log", "harmonic".
std::string sigma_preset(const std::string& name);

/// User-defined metric from DSL text. No domain constraints beyond the
/// reality and positivity check at evaluation.
MetricSpec parse_metric(const std::string& name, const std::string& text);

/// Jet of L at the context's base point. Throws DomainViolation when a
/// constraint rejects the point or L fails the reality/positivity check.
WJet eval_L_jet(const MetricSpec& spec, const JetContext& ctx);

struct HomogeneityReport {
    double euler_L;    // |dL/de^k e^k - L| relative
    double euler_g;    // |dg_ij/de^k e^k| relative
    double L_equals_g; // |L - g_ij e^i conj(e^j)| relative
    double scaling;    // max over random lambda of |F(z,le) - |l| F(z,e)| relative
    double worst() const;
};

HomogeneityReport validate_homogeneity(const MetricSpec& spec, const JetContext& ctx, int trials,
                                       std::uint64_t rng_seed = 7);

/// Draws admitted sample points for the metric, rejection-sampled against
/// the domain constraints and guard. Throws DomainViolation if the accept
/// rate is hopeless.
std::vector<Point> sample_admitted(const MetricSpec& spec, int n, std::uint64_t rng_seed);

}  // namespace cfinsler
