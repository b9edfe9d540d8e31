#pragma once

#include <map>
#include <string>

#include "finsler/hypersurface.hpp"
#include "finsler/metric.hpp"
#include "finsler/randers.hpp"

namespace finsler {

// Checked-in model zoo driven by catalog ids. Every entry carries the chart,
// a BH volume form, the declared space-form profile where one is known, and
// admissible samplers for tests and scenario checks.
struct CatalogModel {
  std::string id;
  Metric metric;
  VolumeForm bh_volume;
  SpaceFormProfile profile;  // declared unless profile.measured
  bool profile_known = false;

  // Admissible random samples (kept away from chart boundary / any direction
  // degeneracies of the norm).
  Vec sample_point(Rng& rng) const;
  Vec sample_direction(Rng& rng) const;

  double interior_radius = 0.0;   // sampling radius for points
  bool axis_degenerate = false;   // quartic-type norms: keep y off the axes
};

// ids: euclidean, minkowski-quartic, riemannian-sphere-stereographic,
// randers-rotation, randers-dilation, randers-sphere-rotation, funk-ball.
CatalogModel make_catalog_model(const std::string& id, int n,
                                const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_model_ids();

// Surfaces: hyperplane (direction, level), sphere (radius; Euclidean |x|),
// f-sphere (radius; Minkowski norms only), cylinder (radius; n >= 3),
// non-isoparametric control "tilted-parabola" f = x1 + x2^2.
LevelSetSurface make_catalog_surface(const CatalogModel& model, const std::string& id,
                                     const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_surface_ids();

}  // namespace finsler
