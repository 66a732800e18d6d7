#pragma once

// The local complex Berwald frame {l, m} with its horizontal lift
// {lambda, mu}, the vertical scalars A, B, the eight horizontal scalars
// J..H, and the identity residual suites attached to them.

#include <map>
#include <string>

#include "cfinsler/geometry.hpp"

namespace cfinsler {

struct VerticalFrame {
    WJet F;        // sqrt(L)
    WJet sqrt_g;   // principal square root of det g
    Vec2 l_up;     // l^i = eta^i / F
    Vec2 l_dn;     // l_i = g_{i jbar} etabar^j / F
    Vec2 m_up;
    Vec2 m_dn;
};

struct VerticalScalars {
    WJet A;
    WJet B;
    double decomposition_residual = 0.0;  // C vs (2.4) reconstruction
};

struct HorizontalScalars {
    WJet J, U, V, X, O, Y, E, H;
    double reconstruction_residual = 0.0;  // L vs (2.10) reconstruction
};

VerticalFrame build_frame(const FundamentalTensor& ft, const JetContext& ctx);

VerticalScalars vertical_scalars(const VerticalFrame& fr, const ChernFinslerConnection& conn);

HorizontalScalars horizontal_scalars(const VerticalFrame& fr, const ChernFinslerConnection& conn);

// Vertical frame operators: directional eta-derivatives along l, m and
// their conjugates.
WJet op_l(const VerticalFrame& fr, const WJet& X);
WJet op_lbar(const VerticalFrame& fr, const WJet& X);
WJet op_m(const VerticalFrame& fr, const WJet& X);
WJet op_mbar(const VerticalFrame& fr, const WJet& X);

// Horizontal lift: lambda = l^i delta_i, mu = m^i delta_i and conjugates.
WJet op_lambda(const VerticalFrame& fr, const Mat2& N, const WJet& X);
WJet op_lambda_bar(const VerticalFrame& fr, const Mat2& N, const WJet& X);
WJet op_mu(const VerticalFrame& fr, const Mat2& N, const WJet& X);
WJet op_mu_bar(const VerticalFrame& fr, const Mat2& N, const WJet& X);

struct ResidualReport {
    std::map<std::string, double> items;  // identity name -> relative residual
    double worst() const;
};

struct FrameBundle {
    VerticalFrame frame;
    VerticalScalars vs;
    HorizontalScalars hs;
};

FrameBundle compute_frame(const GeometryData& gd);

/// Residuals for the frame identity families: the vertical operator table,
/// the vertical covariant derivatives of the frame, the A/B expansions,
/// the lambda/mu action table, the horizontal covariant derivatives of the
/// frame, and the vertical expansions of J, V, O, E.
ResidualReport frame_identity_residuals(const GeometryData& gd, const FrameBundle& fb);

struct KahlerScalarTest {
    double uv_residual;  // |U - V| relative
    double ye_residual;  // |Y - E| relative
    double scale;
};

KahlerScalarTest kahler_scalar_test(const HorizontalScalars& hs);

}  // namespace cfinsler
