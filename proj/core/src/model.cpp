#include "nlds/model.hpp"

#include <algorithm>
#include <sstream>

#include "nlds/error.hpp"
#include "nlds/matspec.hpp"

namespace nlds {

namespace {

// Kernel-sign entries are capped per kernel so a sign-indefinite kernel does
// not produce n^2 report lines.
constexpr std::size_t kMaxKernelSignEntries = 32;

}  // namespace

void DispersalSystem::check_shape() const {
  std::ostringstream msg;
  if (l == 0) {
    msg << "system needs at least one species";
  } else if (l1 > l) {
    msg << "l1 = " << l1 << " exceeds l = " << l;
  } else if (d.size() != l) {
    msg << "expected " << l << " diffusion rates, got " << d.size();
  } else if (kernels.size() != l1) {
    msg << "expected " << l1 << " kernels, got " << kernels.size();
  } else if (coefficients.l != l || coefficients.entries.size() != l * l) {
    msg << "expected an " << l << "x" << l << " coefficient field, got " << coefficients.entries.size()
        << " entries";
  } else {
    return;
  }
  throw DimensionError(msg.str());
}

DispersalSystem DispersalSystem::with_d(std::vector<double> new_d) const {
  DispersalSystem copy = *this;
  copy.d = std::move(new_d);
  copy.check_shape();
  return copy;
}

SampledSystem sample(const DispersalSystem& sys, const Grid& grid) {
  sys.check_shape();
  if (grid.a() != sys.domain.a || grid.b() != sys.domain.b)
    throw DimensionError("grid interval differs from the system domain");

  SampledSystem out{grid, sys.l, sys.l1, sys.d, {}, {}};
  const std::size_t n = grid.size();
  const auto& x = grid.points();

  out.kernels.reserve(sys.l1);
  for (const auto& kernel : sys.kernels) {
    Eigen::MatrixXd K(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) K(a, b) = kernel.expr.eval(x[a], x[b]);
    out.kernels.push_back(std::move(K));
  }

  out.coefficients.reserve(n);
  for (std::size_t a = 0; a < n; ++a) out.coefficients.push_back(coefficients_at(sys, x[a]));
  return out;
}

Eigen::MatrixXd coefficients_at(const DispersalSystem& sys, double x) {
  const std::size_t l = sys.coefficients.l;
  Eigen::MatrixXd M(l, l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) M(i, j) = sys.coefficients.at(i, j).eval(x);
  return M;
}

bool ValidationReport::passed() const {
  return std::none_of(violations.begin(), violations.end(), [](const Violation& v) { return v.blocking; });
}

bool ValidationReport::holds(Hypothesis h) const {
  return std::none_of(violations.begin(), violations.end(),
                      [h](const Violation& v) { return v.hypothesis == h; });
}

std::vector<std::size_t> ValidationReport::reducible_nodes() const {
  std::vector<std::size_t> nodes;
  for (const auto& v : violations)
    if (v.hypothesis == Hypothesis::H2) nodes.push_back(v.node);
  return nodes;
}

ValidationReport validate(const SampledSystem& s) {
  ValidationReport report;
  const std::size_t n = s.n();
  const auto& x = s.grid.points();

  for (std::size_t a = 0; a < n; ++a) {
    const auto& M = s.coefficients[a];
    for (std::size_t i = 0; i < s.l; ++i) {
      for (std::size_t j = 0; j < s.l; ++j) {
        if (i == j || M(i, j) >= 0.0) continue;
        std::ostringstream msg;
        msg << "m_" << i + 1 << j + 1 << "(" << x[a] << ") = " << M(i, j) << " < 0";
        report.violations.push_back({Hypothesis::H1, a, i, j, std::nullopt, M(i, j), true, msg.str()});
      }
    }
  }

  std::vector<Violation> h2;
  for (std::size_t a = 0; a < n; ++a) {
    if (is_irreducible(s.coefficients[a])) continue;
    std::ostringstream msg;
    msg << "M(" << x[a] << ") is reducible";
    h2.push_back({Hypothesis::H2, a, 0, 0, std::nullopt, x[a], false, msg.str()});
  }
  if (h2.size() == n)
    for (auto& v : h2) v.blocking = true;
  report.violations.insert(report.violations.end(), h2.begin(), h2.end());

  for (std::size_t i = 0; i < s.l1; ++i) {
    const auto& K = s.kernels[i];
    for (std::size_t a = 0; a < n; ++a) {
      if (K(a, a) > 0.0) continue;
      std::ostringstream msg;
      msg << "k_" << i + 1 << "(x, x) = " << K(a, a) << " at x = " << x[a];
      report.violations.push_back({Hypothesis::H3, a, a, a, i, K(a, a), true, msg.str()});
    }
    std::size_t sign_count = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (K(a, b) >= 0.0) continue;
        if (++sign_count > kMaxKernelSignEntries) continue;
        std::ostringstream msg;
        msg << "k_" << i + 1 << "(" << x[a] << ", " << x[b] << ") = " << K(a, b) << " < 0";
        report.violations.push_back({Hypothesis::KernelSign, a, a, b, i, K(a, b), true, msg.str()});
      }
    }
    if (sign_count > kMaxKernelSignEntries) {
      std::ostringstream msg;
      msg << sign_count - kMaxKernelSignEntries << " further negative values of k_" << i + 1 << " omitted";
      report.violations.push_back({Hypothesis::KernelSign, 0, 0, 0, i, 0.0, true, msg.str()});
    }
  }

  bool negative = false;
  for (std::size_t i = 0; i < s.l; ++i) {
    if (s.d[i] >= 0.0) continue;
    negative = true;
    std::ostringstream msg;
    msg << "d_" << i + 1 << " = " << s.d[i] << " is negative";
    report.violations.push_back({Hypothesis::H4, 0, i, i, i, s.d[i], true, msg.str()});
  }
  if (!negative) {
    const bool head_positive = std::all_of(s.d.begin(), s.d.begin() + static_cast<std::ptrdiff_t>(s.l1),
                                           [](double v) { return v > 0.0; });
    const bool tail_zero = std::all_of(s.d.begin() + static_cast<std::ptrdiff_t>(s.l1), s.d.end(),
                                       [](double v) { return v == 0.0; });
    if (head_positive && tail_zero) {
      report.mode = s.l1 == s.l ? Mode::NonDegenerate : Mode::PartiallyDegenerate;
    } else {
      std::ostringstream msg;
      msg << "diffusion rates fit neither H4 nor H4' for l1 = " << s.l1;
      report.violations.push_back({Hypothesis::H4, 0, 0, 0, std::nullopt, 0.0, false, msg.str()});
    }
  }
  return report;
}

ValidationReport validate(const DispersalSystem& sys, const Grid& grid) { return validate(sample(sys, grid)); }

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1:
      return "H1";
    case Hypothesis::H2:
      return "H2";
    case Hypothesis::H3:
      return "H3";
    case Hypothesis::H4:
      return "H4";
    case Hypothesis::KernelSign:
      return "kernel-sign";
  }
  return "?";
}

std::string to_string(Mode m) {
  return m == Mode::NonDegenerate ? "NonDegenerate" : "PartiallyDegenerate";
}

}  // namespace nlds
