#include "nlds/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "nlds/error.hpp"

namespace nlds {

SupEstimate refine_sup(const std::function<double(double)>& f, const Grid& grid) {
  const auto& x = grid.points();
  const std::size_t n = x.size();
  SupEstimate out;
  out.grid_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double v = f(x[k]);
    if (v > out.grid_value) {
      out.grid_value = v;
      out.grid_index = k;
    }
  }
  out.value = out.grid_value;
  out.argmax = x[out.grid_index];

  double lo = out.grid_index == 0 ? grid.a() : x[out.grid_index - 1];
  double hi = out.grid_index + 1 == n ? grid.b() : x[out.grid_index + 1];
  const double fa = f(grid.a());
  const double fb = f(grid.b());
  if (fa > out.value) {
    out.value = fa;
    out.argmax = grid.a();
    lo = grid.a();
    hi = x.front();
  }
  if (fb > out.value) {
    out.value = fb;
    out.argmax = grid.b();
    lo = x.back();
    hi = grid.b();
  }

  std::uintmax_t max_iter = 200;
  const auto [xm, neg] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi,
                                                               std::numeric_limits<double>::digits, max_iter);
  if (-neg > out.value) {
    out.value = -neg;
    out.argmax = xm;
  }
  return out;
}

LadderOutcome epsilon_ladder(const std::function<double(double)>& g, double base, double threshold, double margin) {
  LadderOutcome out;
  for (double eps : kEpsilonLadder) {
    const double arg = base + eps;
    double v = g(arg);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (!out.samples.empty()) {
      const double prev = out.samples.back().second;
      if (std::isfinite(prev) && v < prev - 1e-10 * std::max(1.0, std::abs(prev))) {
        out.samples.emplace_back(arg, v);
        std::ostringstream msg;
        msg << "ladder value decreased from " << prev << " to " << v << " at " << arg;
        throw ClassificationError(msg.str(), out.samples);
      }
    }
    out.samples.emplace_back(arg, v);
  }
  out.above = out.samples.back().second > threshold + margin;
  return out;
}

RootResult bisect_decreasing(const std::function<double(double)>& f, double base, double tol,
                             std::size_t max_iter) {
  double step = 1e-6;
  double lo = base;
  double hi = base + step;
  std::size_t doublings = 0;
  while (!(f(hi) < 0.0)) {
    if (++doublings > max_iter) throw ConvergenceError("bisect_decreasing: no sign change found", hi, {});
    lo = hi;
    step *= 2.0;
    hi = base + step;
  }

  std::uintmax_t iters = max_iter;
  // Only the sign at the open end is known; evaluate bisection on the signed function
  // with lo treated as positive when it is the excluded base point.
  auto g = [&](double t) { return t == base ? 1.0 : f(t); };
  auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] = boost::math::tools::bisect(g, lo, hi, done, iters);
  return {0.5 * (a + b), static_cast<std::size_t>(iters) + doublings};
}

}  // namespace nlds
