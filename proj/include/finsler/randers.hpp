#pragma once

#include <memory>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

// Zermelo navigation data: a Riemannian metric h and a vector field W with
// ||W||_h < 1 on the chart. Both are analytic fields, so every covariant
// derivative below is exact (dual-number differentiation, no stencils).
struct NavigationData {
  int n = 0;
  Chart chart;
  std::shared_ptr<const MatrixField> h;
  std::shared_ptr<const VectorField> W;

  Mat h_at(const Vec& x) const;
  Vec W_at(const Vec& x) const;
  double lambda_at(const Vec& x) const;  // 1 - ||W||_h^2
  // Levi-Civita coefficients of h.
  Tensor3 christoffel(const Vec& x) const;
  // Geodesic coefficients of h: Gbar^i = 1/2 Gamma^i_jk y^j y^k.
  Vec h_spray(const Vec& x, const Vec& y) const;
};

struct KillingClassification {
  enum class Verdict { killing, homothetic, generic };
  Verdict verdict = Verdict::generic;
  double kappa = 0.0;        // homothetic factor when applicable
  double defect = 0.0;       // sup norm of the residual that decided the verdict
};

struct STensors {
  Mat s_low;   // s_ij = 1/2 (W_i|j - W_j|i)
  Vec s_cov;   // s_j = W^i s_ij
  Vec s_up;    // s^i = h^{ij} s_j
  Mat s_mixed; // s^i_j
  Vec s_mixed_y;  // s^i_0 = s^i_j y^j
};

// F = (sqrt(lambda h^2 + W_0^2) - W_0) / lambda as a chart metric. Throws
// NavigationDomainViolation when ||W||_h >= 1 anywhere on a deterministic
// sample of the chart.
Metric build_randers(std::shared_ptr<const NavigationData> nav);

// Closed-form dual metric F*(xi) = sqrt(h^{ij} xi_i xi_j) + W^i xi_i.
double randers_dual(const NavigationData& nav, const Vec& x, const Vec& xi);
// Closed-form Legendre inverse y^i = F*(xi) [F*]_{xi_i}(xi).
Vec randers_legendre_inverse(const NavigationData& nav, const Vec& x, const Vec& xi);

KillingClassification killing_classify(const NavigationData& nav,
                                       const std::vector<Vec>& samples, double tol = 1e-9);

STensors s_tensors(const NavigationData& nav, const Vec& x, const Vec& y);

// Closed-form spray for Killing W: G^i = Gbar^i - F s^i_0 - 1/2 F^2 s^i.
// Callers must have classified W as Killing; throws NotKilling otherwise.
Vec randers_spray_closed(const NavigationData& nav, const Vec& x, const Vec& y,
                         const KillingClassification& cls);

// Closed-form BH density sigma = sqrt(det h) lambda^{(n+1)/2}; the quadrature
// cross-check lives in the test suite.
double bh_density_randers(const NavigationData& nav, const Vec& x);
VolumeForm make_randers_bh_volume(std::shared_ptr<const NavigationData> nav);

struct TorsionAuditReport {
  double sup_torsion = 0.0;          // sup ||T_eta(X)|| over samples
  double sup_residual_vs_2cpX = 0.0; // sup ||T_eta(X) - 2 c' X|| (homothetic case)
  double c_prime = 0.0;              // measured from the S-curvature
  int samples = 0;
};

TorsionAuditReport torsion_audit(const NavigationData& nav, const Metric& model,
                                 const VolumeForm& vol, int sample_count, Rng& rng);

}  // namespace finsler
