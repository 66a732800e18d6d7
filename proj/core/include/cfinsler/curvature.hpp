#pragma once

// Curvature blocks of the Chern-Finsler connection, the lowered Riemann type
// tensors, the invariants I, K, W, the holomorphic sectional curvatures and
// the identity/Bianchi residual suites.

#include "cfinsler/frame.hpp"
#include "cfinsler/geometry.hpp"

namespace cfinsler {

using Ten4 = std::array<Ten3, 2>;

struct CurvatureTensors {
    // up blocks, [i][j][h][k] = X^i_{j hbar k}
    Ten4 R, P, Xi, S;
    // lowered with g_{i rbar}: [r][j][h][k] = X_{rbar j hbar k}
    Ten4 Rl, Pl, Xil, Sl;
};

CurvatureTensors curvature_tensors(const GeometryData& gd);

/// Conjugation-symmetry residuals at the base point: the pairing of R with
/// itself, Xi with P, and the S index symmetries.
ResidualReport conjugation_residuals(const CurvatureTensors& cv);

/// Residuals of the six structural identities tying the curvature blocks to
/// covariant derivatives of the connection coefficients.
ResidualReport prop21_residuals(const GeometryData& gd, const CurvatureTensors& cv);

struct InvariantI {
    WJet I;                       // from the B-formula, kept as a jet
    double structure_residual;    // S minus rank-one m-structure
    double contraction_residual;  // vs the 4-way m contraction of S
    double imag_defect;
};

InvariantI invariant_I(const GeometryData& gd, const FrameBundle& fb,
                       const CurvatureTensors& cv);

WJet invariant_K(const GeometryData& gd, const FrameBundle& fb);
WJet invariant_W(const GeometryData& gd, const FrameBundle& fb);

struct SectionalCurvatures {
    // each pair: Riemann contraction route, invariant-formula route
    Complex Kv_l_contraction, Kv_l_formula;
    Complex Kv_m_contraction, Kv_m_formula;
    Complex Kh_lambda_contraction, Kh_lambda_formula;
    Complex Kh_mu_contraction, Kh_mu_formula;
    double worst_disagreement;  // relative, over the four pairs
};

SectionalCurvatures sectional_curvatures(const GeometryData& gd, const FrameBundle& fb,
                                         const CurvatureTensors& cv);

/// Max relative residual of the sixteen-term reconstruction of the
/// h-hbar Riemann type tensor from the frame scalars and invariants.
double hh_decomposition_residual(const GeometryData& gd, const FrameBundle& fb,
                                 const CurvatureTensors& cv);

/// Bianchi identity residuals; needs context order >= 6.
ResidualReport bianchi_residuals(const GeometryData& gd, const CurvatureTensors& cv);

/// Residual of I|_0 = -I, with I retained as a jet.
double theorem41_iii_residual(const WJet& I, const GeometryData& gd);

/// Frame expansions of the mixed vertical derivatives of the horizontal
/// connection: the barred family (nine items) and the unbarred one (five).
ResidualReport prop42_residuals(const GeometryData& gd, const FrameBundle& fb);
ResidualReport prop43_residuals(const GeometryData& gd, const FrameBundle& fb);

struct SprayHolomorphyTest {
    double spray_residual;    // max |d._hbar G^i|, relative
    double scalar_residual;   // |Abar_{|0} + F Abar (J+Y)|, relative
    double link_residual;     // d._hbar G^i vs (F/2)[...] m^i m_hbar
};

SprayHolomorphyTest lemma41_test(const GeometryData& gd, const FrameBundle& fb);

/// Max relative residual of I_{|j} = delta_j I over j.
double invariant_I_hcov_residual(const WJet& I, const GeometryData& gd);

/// |R_{0bar k 0bar 0} - R_{0bar 0 0bar k}| relative to the tensor scale.
double weak_symmetry_residual(const GeometryData& gd, const CurvatureTensors& cv);

struct SpecialFormFit {
    WJet K_fit;               // least-squares scalar of the g g + g g ansatz
    double residual;          // max componentwise relative misfit
    double vertical_defect;   // max |d._k K_fit| relative, 0 when K = K(z)
};

SpecialFormFit special_form_fit(const GeometryData& gd, const CurvatureTensors& cv);

/// Everything above bundled for one point.
struct CurvatureData {
    CurvatureTensors tensors;
    InvariantI inv_I;
    WJet inv_K;
    WJet inv_W;
    SectionalCurvatures sectional;
};

CurvatureData compute_curvature(const GeometryData& gd, const FrameBundle& fb);

}  // namespace cfinsler
