#pragma once

#include <vector>

#include "finsler/focal.hpp"
#include "finsler/hypersurface.hpp"
#include "finsler/legendre.hpp"

namespace finsler {

// Per-level statistics of F(grad f) and the Laplacian over projected samples.
struct IsoparametricReport {
  std::vector<double> levels;
  std::vector<double> a_tilde;        // mean F(grad f) per level
  std::vector<double> a_spread;       // relative spread per level
  std::vector<double> b_tilde;        // mean Laplacian per level (isoparametric run)
  std::vector<double> b_spread;
  bool transnormal = false;
  bool isoparametric = false;
  double tolerance = 0.0;
  int samples_per_level = 0;
};

IsoparametricReport verify_transnormal(const Metric& m, const ScalarField& f,
                                       const std::vector<double>& levels, int samples_per_level,
                                       double tol, Rng& rng, double sample_radius);

IsoparametricReport verify_isoparametric(const Metric& m, const VolumeForm& vol,
                                         const ScalarField& f, const std::vector<double>& levels,
                                         int samples_per_level, double tol, Rng& rng,
                                         double sample_radius);

struct CartanResidual {
  std::vector<double> r;  // one residual per distinct curvature
  double max_abs() const {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  }
};

// r_i = sum_{j != i} m_j (c + l_i l_j)/(l_i - l_j).
CartanResidual cartan_residuals(double c, const CurvatureSpectrum& spec);

struct SpacingCheck {
  std::vector<double> theta;  // ascending in (0, pi)
  double deviation = 0.0;     // max |theta_i - theta_1 - (i-1) pi/g|
};

// Requires c > 0; curvatures are read in descending order so theta ascends.
SpacingCheck check_spacing(double c, const CurvatureSpectrum& spec);

// m_i = m_{i+2 mod g} for all i.
bool check_multiplicity_pattern(const std::vector<int>& m);

// c <= 0: g <= 2. c > 0: spacing within tol and the multiplicity pattern.
bool count_bound_check(double c, const CurvatureSpectrum& spec, double spacing_tol = 1e-9);

// A sampled focal (or synthetic control) submanifold: a local parametrization
// around u = 0 plus the seed unit normals to audit.
struct FocalSample {
  std::function<Vec(const Vec&)> chart;  // u in R^{dim} -> ambient point
  int dim = 0;                           // 0 allowed (focal points)
  std::vector<Vec> normal_seeds;         // ambient unit normals at u = 0
};

struct MinimalityReport {
  double max_trace = 0.0;
  int audited = 0;
  bool vacuous = false;  // all samples zero-dimensional
};

// Anisotropic mean curvature tr A_eta of each sample for each seed normal,
// through the codimension-general shape operator.
MinimalityReport minimality_audit(const Metric& m, const std::vector<FocalSample>& samples,
                                  double fd_step_scale = 1e-4);

// Build focal samples for a level-set hypersurface: collapse the curvature
// cluster `which` of the spectrum at each base point, map through the tube
// construction, estimate the focal tangent space from the image of d(phi_s),
// and attach the mapped normal plus `extra_normals` random completions.
std::vector<FocalSample> make_focal_samples(const Metric& m, const LevelSetSurface& surf,
                                            const std::vector<Vec>& base_points,
                                            bool plus_orientation, double c, int which,
                                            int extra_normals, Rng& rng);

}  // namespace finsler
