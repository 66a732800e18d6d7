#pragma once

// Per-point and aggregated classification flags (purely Hermitian, weakly
// Kaehler, Kaehler, Berwald, Landsberg, ...) with residuals and a
// three-valued verdict band, plus the linear coordinate-change invariance
// check for I, K, W.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfinsler/curvature.hpp"
#include "cfinsler/frame.hpp"
#include "cfinsler/metrics.hpp"

namespace cfinsler {

struct ToleranceConfig {
    double pass_tol = 1e-8;
    double fail_margin = 10.0;  // residual >= fail_margin * pass_tol means "no"
    std::map<std::string, double> overrides;  // per-flag pass tolerance

    double tol_for(const std::string& flag) const;
};

enum class Verdict { Yes, Indeterminate, No };

const char* to_string(Verdict v);

struct FlagResult {
    Verdict verdict = Verdict::Indeterminate;
    double residual = 0.0;
    std::string witness;  // which compared quantity drove the residual
};

struct PointClassification {
    Point point;
    std::map<std::string, FlagResult> flags;
    std::string trichotomy;  // "purely-hermitian" | "A!=0,B=0" | "AB^2!=0" | "indeterminate"
    double trichotomy_residual = 0.0;
    Complex I, K, W;
    double I_hcov_residual = 0.0;  // |I_{|j}| relative
    std::vector<std::string> inconsistencies;  // inclusion-chain violations
};

/// The canonical flag names in report order.
const std::vector<std::string>& classification_flags();

PointClassification classify_point(const MetricSpec& spec, const Point& pt, int order,
                                   const ToleranceConfig& tol);

struct AggregateFlag {
    int yes = 0, no = 0, indeterminate = 0;
    double worst_residual = 0.0;

    Verdict unanimous() const;  // Indeterminate unless all points agree
    double fraction_yes() const;
};

struct ClassificationReport {
    std::vector<PointClassification> points;
    std::map<std::string, AggregateFlag> aggregate;
};

/// Classifies `count` seeded sample points (deterministic in seed and
/// config). Throws DomainViolation when the sampler cannot produce enough
/// admitted points.
ClassificationReport aggregate_classify(const MetricSpec& spec, int count, std::uint64_t seed,
                                        int order, const ToleranceConfig& tol);

struct InvarianceResiduals {
    double I, K, W;
    double worst() const;
};

/// Evaluates the pulled-back metric L'(z',eta') := L(M^-1 z', M^-1 eta') at
/// (M z, M eta) and compares the invariants I, K, W with the originals.
InvarianceResiduals linear_change_invariance(const MetricSpec& spec, const Point& pt,
                                             const std::array<std::array<Complex, 2>, 2>& M,
                                             int order);

}  // namespace cfinsler
