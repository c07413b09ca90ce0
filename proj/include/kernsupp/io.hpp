#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kernsupp/estimator.hpp"
#include "kernsupp/types.hpp"

namespace kernsupp {

struct Dataset {
  PointMatrix rows;
  std::optional<std::vector<double>> labels;
  std::string source;

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dimension() const { return rows.cols(); }
};

struct CsvOptions {
  bool header = false;
  /// Without `header`, a first data line in which no field parses as a
  /// number is still taken as a header.
  bool detect_header = true;
  /// Column holding a label; excluded from the point coordinates.
  std::optional<std::size_t> label_column;
  /// ',' or ' '; 0 picks ',' when the first data line contains one.
  char delimiter = 0;
};

/// Reads a rectangular numeric table. Blank lines and lines starting with
/// '#' are skipped. Errors name the offending line and column.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {}, const std::string& source = "<stream>");

/// RFC-4180 table with a '#'-prefixed metadata header. Numbers are printed
/// with 9 significant digits.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void meta(const std::string& key, const std::string& value);
  /// Adds a `# generated:` line unless suppressed.
  void timestamp(bool enabled);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

  static std::string number(double v);
  static std::string quote(const std::string& field);

private:
  std::ostream& out_;
};

/// Writes points under an x0,x1,... header row.
void write_points_csv(std::ostream& out, PointMatrixRef points, const std::vector<std::pair<std::string, std::string>>& meta,
                      bool with_timestamp);

enum class ModelFormat { Text, Binary };

struct ModelFileOptions {
  ModelFormat format = ModelFormat::Text;
  bool include_decomposition = true;
};

/// Self-describing model file: key=value header (kernel, filter, tau,
/// algorithm, sizes, format), then the training matrix row-major and,
/// optionally, the cached eigendecomposition. Text bodies use 17
/// significant digits so a reload reproduces every double exactly.
void save_model(const SupportModel& model, std::ostream& out, const ModelFileOptions& options = {});
void save_model(const SupportModel& model, const std::string& path, const ModelFileOptions& options = {});
SupportModel load_model(std::istream& in);
SupportModel load_model(const std::string& path);

}  // namespace kernsupp
