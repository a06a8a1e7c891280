#include "spectral_tail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace spectral_tail {

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, std::span<const double> breakpoints,
                           double rel_tol) {
  QuadratureResult out;
  if (!(hi > lo)) return out;
  std::vector<double> nodes{lo};
  for (double b : breakpoints)
    if (b > lo && b < hi) nodes.push_back(b);
  nodes.push_back(hi);
  std::sort(nodes.begin(), nodes.end());

  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    double err = 0.0;
    double l1 = 0.0;
    const double piece =
        rule.integrate(f, nodes[k], nodes[k + 1], rel_tol, &err, &l1);
    out.value += piece;
    // boost reports the error on the [-1, 1] image of the interval
    out.error += err * 0.5 * (nodes[k + 1] - nodes[k]);
  }
  return out;
}

}  // namespace spectral_tail
