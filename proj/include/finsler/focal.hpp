#pragma once

#include <vector>

#include "finsler/geodesic.hpp"
#include "finsler/hypersurface.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// The space-form comparison functions s_c, s_c', s_c'' (branch by sign of c).
struct SCValues {
  double sc = 0.0;
  double scp = 1.0;
  double scpp = 0.0;
};
SCValues sc_eval(double c, double s);

// All s in the window with lambda = s_c'(s)/s_c(s):
//   c > 0: arccot(lambda/sqrt(c))/sqrt(c) + k pi/sqrt(c), arccot in (0, pi)
//   c = 0: {1/lambda} iff lambda > 0
//   c < 0: one value iff lambda > sqrt(-c)
std::vector<double> focal_distances(double c, double lambda, double s_lo, double s_hi);

// phi_s over a sample set on a level-set surface. Throws FocalSingularity when
// check_immersion is set and the mapped differential is rank-deficient at a
// sample.
std::vector<Vec> tube_map(const Metric& m, const LevelSetSurface& surf,
                          bool plus_orientation, double s, const std::vector<Vec>& samples,
                          bool check_immersion = true);

// Principal curvatures of the tube at distance s from the base spectrum
// (Lemma-style transport). For codim > 1 the extra -s_c'/s_c eigenvalue with
// multiplicity codim-1 is appended.
CurvatureSpectrum tube_principal_curvatures(double c, const CurvatureSpectrum& base, double s,
                                            int codim = 1, double guard_tol = 1e-8);

// Shape-operator spectrum of the focal submanifold reached by collapsing the
// i-th curvature: values (c + l_i l_j)/(l_i - l_j) with multiplicities m_j.
std::vector<std::pair<double, int>> focal_submanifold_curvatures(double c, int i,
                                                                 const CurvatureSpectrum& spec);

struct FocalPoint {
  double s = 0.0;
  int multiplicity = 0;
  double smallest_singular = 0.0;
};

// Critical parameters of s -> E(x, s n) found by scanning the smallest
// singular value of the finite-difference Jacobian in surface directions and
// refining each dip by parabolic minimization of its square.
std::vector<FocalPoint> detect_focal_numeric(const Metric& m, const LevelSetSurface& surf,
                                             const Vec& x, bool plus_orientation, double s_lo,
                                             double s_hi, int grid = 200,
                                             double fd_step_scale = 1e-4);

// Independently measured tube spectrum at E(x, s n): tangent vectors from the
// varied normal geodesics, the unit normal from the geodesic velocity (Gauss
// lemma), curvatures from the Weingarten formula. `gauss_residual` reports
// max |L(eta)(X_a)|, the measured normality of the velocity.
struct MeasuredTubeSpectrum {
  CurvatureSpectrum spectrum;
  double gauss_residual = 0.0;
};
MeasuredTubeSpectrum measured_tube_spectrum(const Metric& m, const LevelSetSurface& surf,
                                            const Vec& x, bool plus_orientation, double s,
                                            double cluster_tol = 1e-4,
                                            double fd_step_scale = 1e-4);

// Same measurement for a tube over a lower-dimensional base: the base is a
// parametric patch and the unit-normal family n(u, omega) spans the fibre.
MeasuredTubeSpectrum measured_tube_spectrum_codim(
    const Metric& m, const ParametricPatch& base,
    const std::function<Vec(const Vec& u, const Vec& omega)>& normal_family, const Vec& u0,
    const Vec& omega0, int fibre_dim, double s, double cluster_tol = 1e-4,
    double fd_step_scale = 1e-4);

}  // namespace finsler
