#pragma once

#include <doctest.h>

#include "finsler/catalog.hpp"

namespace finsler::testing {

inline std::vector<std::string> all_model_ids() { return catalog_model_ids(); }

// Unit-F admissible sample at a catalog model.
inline void sample_xy(const CatalogModel& cm, Rng& rng, Vec& x, Vec& y) {
  x = cm.sample_point(rng);
  y = cm.sample_direction(rng);
  y /= eval_F(cm.metric, x, y);
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < a.dim(); ++k) d = std::max(d, std::abs(a(i, j, k) - b(i, j, k)));
  return d;
}

}  // namespace finsler::testing
