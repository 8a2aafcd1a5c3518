#pragma once

#include <stdexcept>
#include <vector>

#include "longjump/analysis/fit.hpp"
#include "longjump/geometry/geometry.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/kernel/stats.hpp"

namespace longjump {

// Continuity exponent of an n-step kernel: least-squares slope of
// log sup_x |k(x y) - k(x)| against log |y|_2 over the given translations.
inline FitResult holder_fit(const DenseKernel& k, const Group& G,
                            const AdaptedGeometry& geom,
                            const std::vector<Element>& ys) {
  std::vector<double> norms, diffs;
  for (const Element& y : ys) {
    double ny = geom.norm_g2(y);
    double d = sup_shift_difference(k, G, y);
    if (ny <= 0.0)
      throw std::invalid_argument("translation must differ from the identity");
    if (d <= 0.0)
      throw std::runtime_error("kernel shows no variation under translation");
    norms.push_back(ny);
    diffs.push_back(d);
  }
  return fit_loglog(norms, diffs);
}

}  // namespace longjump
