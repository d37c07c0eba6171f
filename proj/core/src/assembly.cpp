#include "nlds/assembly.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlds/error.hpp"

namespace nlds {

namespace {

std::vector<std::vector<double>> all_chi(const SampledSystem& s) {
  std::vector<std::vector<double>> chi(s.l, std::vector<double>(s.n(), 0.0));
  for (std::size_t i = 0; i < s.l1; ++i) chi[i] = compute_chi(s.kernels[i], s.grid);
  return chi;
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<char, 8> bytes{};
  for (std::size_t k = 0; k < 8; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
  out.write(bytes.data(), 8);
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw DimensionError("matrix dump truncated");
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<double> compute_chi(const Eigen::MatrixXd& K, const Grid& grid) {
  const std::size_t n = grid.size();
  if (static_cast<std::size_t>(K.rows()) != n || static_cast<std::size_t>(K.cols()) != n)
    throw DimensionError("compute_chi: kernel samples do not match the grid");
  const auto& w = grid.weights();
  std::vector<double> chi(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) sum += K(b, a) * w[b];
    chi[a] = sum;
  }
  return chi;
}

std::vector<double> compute_chi(const KernelSpec& kernel, const Grid& grid) {
  std::vector<double> chi(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) chi[a] = chi_at(kernel, grid, grid.point(a));
  return chi;
}

double chi_at(const KernelSpec& kernel, const Grid& grid, double x) {
  double sum = 0.0;
  const auto& pts = grid.points();
  const auto& w = grid.weights();
  for (std::size_t b = 0; b < pts.size(); ++b) sum += kernel.expr.eval(pts[b], x) * w[b];
  return sum;
}

Eigen::MatrixXd dispersal_block(const Eigen::MatrixXd& K, const Grid& grid, double d) {
  const auto chi = compute_chi(K, grid);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd D(n, n);
  const auto& w = grid.weights();
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) D(a, b) = d * K(a, b) * w[static_cast<std::size_t>(b)];
  for (Eigen::Index a = 0; a < n; ++a) D(a, a) -= d * chi[static_cast<std::size_t>(a)];
  return D;
}

AssembledOperator assemble(const SampledSystem& s) {
  const std::size_t n = s.n();
  const auto ni = static_cast<Eigen::Index>(n);
  AssembledOperator op;
  op.l = s.l;
  op.l1 = s.l1;
  op.n = n;
  op.d = s.d;
  op.grid = s.grid;
  op.chi = all_chi(s);
  op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.l) * ni, static_cast<Eigen::Index>(s.l) * ni);

  for (std::size_t i = 0; i < s.l1; ++i) {
    if (s.d[i] == 0.0) continue;
    const auto off = static_cast<Eigen::Index>(i) * ni;
    op.matrix.block(off, off, ni, ni) = dispersal_block(s.kernels[i], s.grid, s.d[i]);
  }
  for (std::size_t a = 0; a < n; ++a) {
    const auto& M = s.coefficients[a];
    for (std::size_t i = 0; i < s.l; ++i)
      for (std::size_t j = 0; j < s.l; ++j)
        op.matrix(static_cast<Eigen::Index>(i * n + a), static_cast<Eigen::Index>(j * n + a)) += M(i, j);
  }
  return op;
}

AssembledOperator assemble_operator(const DispersalSystem& sys, const Grid& grid, AssembleOptions opts) {
  const SampledSystem s = sample(sys, grid);
  if (!opts.force) {
    const auto report = validate(s);
    if (!report.passed()) {
      std::ostringstream msg;
      msg << "validation failed:";
      for (const auto& v : report.violations)
        if (v.blocking) msg << "\n  [" << to_string(v.hypothesis) << "] " << v.message;
      throw ValidationError(msg.str());
    }
  }
  return assemble(s);
}

PointwiseA pointwise_A(const SampledSystem& s) {
  const auto chi = all_chi(s);
  PointwiseA out;
  out.matrices.reserve(s.n());
  for (std::size_t a = 0; a < s.n(); ++a) {
    Eigen::MatrixXd A = s.coefficients[a];
    for (std::size_t i = 0; i < s.l1; ++i) A(i, i) -= s.d[i] * chi[i][a];
    out.matrices.push_back(std::move(A));
  }
  return out;
}

PointwiseA pointwise_A(const DispersalSystem& sys, const Grid& grid) { return pointwise_A(sample(sys, grid)); }

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& m) {
  put_le(out, static_cast<std::uint64_t>(m.rows()));
  put_le(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_le(out, m(i, j));
}

Eigen::MatrixXd read_matrix_binary(std::istream& in) {
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  if (rows > (1u << 20) || cols > (1u << 20)) throw DimensionError("matrix dump has implausible dimensions");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get_le<double>(in);
  return m;
}

}  // namespace nlds
