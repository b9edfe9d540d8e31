#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "finsler/legendre.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Regular level set M = f^{-1}(level) of a scalar function on the chart.
struct LevelSetSurface {
  ScalarField f;
  double level = 0.0;
};

// Immersed patch psi: parameter box in R^m -> chart coordinates.
struct ParametricPatch {
  int mdim = 0;
  std::function<Vec(const Vec&)> chart_map;
  std::function<Mat(const Vec&)> jac;  // optional; finite differences otherwise
  double fd_step = 1e-6;

  Mat jacobian_at(const Vec& u) const;
};

struct NormalPair {
  Vec n_plus;   // grad f / F(grad f) for level sets
  Vec n_minus;  // eta_minus of n_plus
};

// Distinct principal curvatures with multiplicities (ascending values).
struct CurvatureSpectrum {
  std::vector<double> values;
  std::vector<int> multiplicities;
  double cluster_tol = 1e-6;

  int g() const { return static_cast<int>(values.size()); }
  int total_multiplicity() const {
    int s = 0;
    for (int m : multiplicities) s += m;
    return s;
  }
};

// Shape operator at a point: a g_n-orthonormal tangent basis (columns) and the
// operator matrix in that basis.
struct ShapeOperator {
  Mat basis;   // n x m
  Mat matrix;  // m x m, symmetric up to roundoff
  Vec normal;
};

// Project a chart point onto the level set along its differential
// (1-D safeguarded root solve). Throws IrregularPoint when df vanishes.
Vec project_to_level_set(const Metric& m, const LevelSetSurface& surf, const Vec& x0,
                         double tol = 1e-13, int max_iters = 80);

// Euclidean-orthonormal basis of ker(row) via column-pivoted QR.
Mat annihilator_basis(const Vec& row);

// g_n-orthonormalized tangent basis at x on the surface.
Mat tangent_basis(const Metric& m, const LevelSetSurface& surf, const Vec& x, const Vec& n);

NormalPair unit_normal(const Metric& m, const LevelSetSurface& surf, const Vec& x);
NormalPair unit_normal(const Metric& m, const ParametricPatch& patch, const Vec& u);

// The canonical unit normal field of a level set, evaluable off the surface.
std::function<Vec(const Vec&)> level_set_normal_field(const Metric& m, const LevelSetSurface& surf,
                                                      bool plus_orientation);

ShapeOperator shape_operator(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                             const Vec& n, double fd_step_scale = 1e-5);
ShapeOperator shape_operator(const Metric& m, const ParametricPatch& patch, const Vec& u,
                             double fd_step_scale = 1e-5);

CurvatureSpectrum principal_curvatures(const ShapeOperator& A, double cluster_tol = 1e-6);
CurvatureSpectrum principal_curvatures(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                                       const Vec& n, double cluster_tol = 1e-6);

double anisotropic_mean_curvature(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                                  const Vec& n);

double second_fundamental_form(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                               const Vec& n, const Vec& X, const Vec& Y);

// Reversible torsion T_eta(X) = D^eta_X eta + D^{eta_-}_X eta_- of a unit
// vector field. The eta_- field is evaluated pointwise from eta.
Vec reversible_torsion(const Metric& m, const std::function<Vec(const Vec&)>& eta_field,
                       const Vec& x, const Vec& X, double fd_step_scale = 1e-5);

// Cluster sorted eigenvalues into a spectrum.
CurvatureSpectrum cluster_eigenvalues(const Vec& eig, double cluster_tol);

}  // namespace finsler
