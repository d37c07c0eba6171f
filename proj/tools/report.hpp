#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlds/analysis.hpp"
#include "nlds/epidemic.hpp"
#include "nlds/model.hpp"
#include "nlds/opspec.hpp"
#include "nlds/reduce.hpp"

namespace nlds::cli {

inline constexpr const char* kArtifactVersion = "0.3.0";

nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const SpectralReport& r);
nlohmann::json to_json(const PerronWeight& w);
nlohmann::json to_json(const Threshold& t);
nlohmann::json to_json(const ReducedQuantities& q, double tol);
nlohmann::json to_json(const SweepTable& t);
nlohmann::json to_json(const IntegrabilityReport& r);
nlohmann::json to_json(const R0Report& r, double tol);
nlohmann::json to_json(const ProbeResult& p);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);

/// Rows of %.17g values, comma separated, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<double>& values);
  /// Mixed text and numbers; numbers are formatted by cell().
  void raw(const std::vector<std::string>& cells);
  const std::string& text() const noexcept { return text_; }

  static std::string cell(double v);

 private:
  std::size_t width_;
  std::string text_;
};

/// Writes a file in binary mode so line endings stay LF.
void write_file(const std::string& path, const std::string& content);

}  // namespace nlds::cli
