#pragma once

#include "finsler/fields.hpp"
#include "finsler/metric.hpp"

// Central finite-difference twins of the dual-number tensor pipeline. Each
// oracle differentiates only plain evaluations of the layer below it (F^2 for
// g and G; already-validated tensors for the higher derivatives), never the
// code path it checks. Used by the verification checks and the test suite.

namespace finsler {

// g_ij from second differences of 1/2 F^2 (step h2).
Mat oracle_fundamental_tensor(const Metric& m, const Vec& x, const Vec& y, double h2 = 1e-4);

// C_ijk = 1/2 dg_ij/dy^k from first differences of the dual-number g.
Tensor3 oracle_cartan(const Metric& m, const Vec& x, const Vec& y, double h1 = 1e-5);

// G^i assembled purely from F^2 stencils (cross stencil for the mixed term).
Vec oracle_spray_G(const Metric& m, const Vec& x, const Vec& y, double h = 1e-4);

// N^i_j from first differences of the dual-number G.
Mat oracle_spray_N(const Metric& m, const Vec& x, const Vec& y, double h1 = 1e-5);

// Gamma^i_jk from second differences of the dual-number G.
Tensor3 oracle_spray_Gamma(const Metric& m, const Vec& x, const Vec& y, double h2 = 1e-4);

// L_ijk = -1/2 g_lm y^l dGamma^m_jk/dy^i from first differences of Gamma.
Tensor3 oracle_landsberg(const Metric& m, const Vec& x, const Vec& y, double h1 = 1e-5);

// Same contraction from nested third differences of G alone (coarser).
Tensor3 oracle_landsberg_third_diff(const Metric& m, const Vec& x, const Vec& y, double h = 2e-3);

// Divergence-form Laplacian (1/sigma) d_i (sigma (grad f)^i) by central
// differences; the production Laplacian uses the trace formula instead.
double oracle_divergence_laplacian(const Metric& m, const VolumeForm& vol, const ScalarField& f,
                                   const Vec& x, double h_scale = 1e-5);

// Levi-Civita coefficients of a Riemannian coefficient field.
Tensor3 levi_civita_christoffel(const MatrixField& h, const Vec& x);

}  // namespace finsler
