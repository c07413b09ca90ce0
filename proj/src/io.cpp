#include "kernsupp/io.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "kernsupp/error.hpp"
#include "kernsupp/format.hpp"

namespace kernsupp {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  if (delimiter == ',') {
    auto fields = split(line, ',');
    for (auto& f : fields) f = std::string(trim(f));
    return fields;
  }
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

bool numeric(const std::string& field) {
  try {
    parse_real(field, "cell");
    return true;
  } catch (const UsageError&) {
    return false;
  }
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::vector<std::vector<double>> values;
  std::vector<double> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = options.header;
  bool seen_data = options.header;
  char delimiter = options.delimiter;

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (delimiter == 0) delimiter = line.find(',') != std::string::npos ? ',' : ' ';
    const auto fields = split_fields(line, delimiter);
    if (!seen_data && options.detect_header && std::none_of(fields.begin(), fields.end(), numeric)) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    if (width == 0) {
      width = fields.size();
      if (options.label_column && *options.label_column >= width) {
        throw DataError(source + ":" + std::to_string(line_no) + ": label column " +
                        std::to_string(*options.label_column) + " out of range");
      }
      if (width - (options.label_column ? 1 : 0) == 0) {
        throw DataError(source + ":" + std::to_string(line_no) + ": no coordinate columns");
      }
    } else if (fields.size() != width) {
      throw DataError(source + ":" + std::to_string(line_no) + ": ragged row with " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      try {
        v = parse_real(fields[c], "cell");
      } catch (const UsageError&) {
        throw DataError(source + ":" + std::to_string(line_no) + ": column " +
                        std::to_string(c + 1) + ": non-numeric cell '" + fields[c] + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(source + ":" + std::to_string(line_no) + ": column " +
                        std::to_string(c + 1) + ": non-finite value");
      }
      if (options.label_column && c == *options.label_column) {
        labels.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    values.push_back(std::move(row));
  }
  if (values.empty()) throw DataError(source + ": no data rows");

  Dataset ds;
  ds.source = source;
  ds.rows.resize(static_cast<Eigen::Index>(values.size()),
                 static_cast<Eigen::Index>(values.front().size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values[i].size(); ++j) {
      ds.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
    }
  }
  if (options.label_column) ds.labels = std::move(labels);
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, options, path);
}

void CsvWriter::meta(const std::string& key, const std::string& value) {
  out_ << "# " << key << ": " << value << "\n";
}

void CsvWriter::timestamp(bool enabled) {
  if (!enabled) return;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta("generated", buf);
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
}

std::string CsvWriter::number(double v) { return format_real(v, 9); }

std::string CsvWriter::quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_points_csv(std::ostream& out, PointMatrixRef points,
                      const std::vector<std::pair<std::string, std::string>>& meta,
                      bool with_timestamp) {
  CsvWriter w(out);
  w.timestamp(with_timestamp);
  for (const auto& [k, v] : meta) w.meta(k, v);
  std::vector<std::string> cols;
  for (Eigen::Index j = 0; j < points.cols(); ++j) cols.push_back("x" + std::to_string(j));
  w.header(cols);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::vector<std::string> f;
    for (Eigen::Index j = 0; j < points.cols(); ++j) f.push_back(CsvWriter::number(points(i, j)));
    w.row(f);
  }
}

// ---- model files ----------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "# kernsupp model";

void write_row_text(std::ostream& out, const double* data, Eigen::Index count) {
  for (Eigen::Index j = 0; j < count; ++j) {
    if (j) out << ',';
    out << format_real(data[j]);
  }
  out << '\n';
}

void read_rows_text(std::istream& in, double* data, Eigen::Index rows, Eigen::Index cols,
                    const char* what) {
  std::string line;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError(std::string("model file: truncated ") + what);
    const auto fields = split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw DataError(std::string("model file: malformed ") + what + " row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      try {
        data[i * cols + j] = parse_real(fields[static_cast<std::size_t>(j)], what);
      } catch (const UsageError& e) {
        throw DataError(std::string("model file: ") + e.what());
      }
    }
  }
}

void expect_line(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected) {
    throw DataError("model file: expected '" + expected + "'");
  }
}

void read_binary(std::istream& in, double* data, std::size_t count, const char* what) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw DataError(std::string("model file: truncated binary ") + what);
}

void write_binary(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace

void save_model(const SupportModel& model, std::ostream& out, const ModelFileOptions& options) {
  const auto n = model.size();
  const auto d = model.dimension();
  const bool binary = options.format == ModelFormat::Binary;
  out << kModelMagic << '\n';
  out << "version=1\n";
  out << "format=" << (binary ? "binary" : "text") << '\n';
  out << model.kernel().to_string() << '\n';
  out << model.filter().to_string() << '\n';
  out << "tau=" << format_real(model.tau()) << '\n';
  out << "algorithm=" << to_string(model.algorithm()) << '\n';
  out << "n=" << n << '\n';
  out << "d=" << d << '\n';
  out << "decomposition=" << (options.include_decomposition ? 1 : 0) << '\n';

  const auto& dec = model.decomposition();
  if (binary) {
    out << "data\n";
    write_binary(out, model.training_points().data(), static_cast<std::size_t>(n * d));
    if (options.include_decomposition) {
      write_binary(out, dec.eigenvalues.data(), static_cast<std::size_t>(n));
      write_binary(out, dec.eigenvectors.data(), static_cast<std::size_t>(n * n));
    }
    out << "\nend\n";
  } else {
    out << "points\n";
    for (Eigen::Index i = 0; i < n; ++i) write_row_text(out, model.training_points().row(i).data(), d);
    if (options.include_decomposition) {
      out << "eigenvalues\n";
      write_row_text(out, dec.eigenvalues.data(), n);
      out << "eigenvectors\n";
      // Row i holds column i of V.
      for (Eigen::Index j = 0; j < n; ++j) write_row_text(out, dec.eigenvectors.col(j).data(), n);
    }
    out << "end\n";
  }
  if (!out) throw DataError("failed writing model file");
}

void save_model(const SupportModel& model, const std::string& path, const ModelFileOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_model(model, out, options);
}

SupportModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kModelMagic) {
    throw DataError("not a kernsupp model file");
  }
  std::map<std::string, std::string, std::less<>> header;
  std::string kernel_line;
  std::string filter_line;
  std::string body;
  while (std::getline(in, line)) {
    const auto t = std::string(trim(line));
    if (t == "points" || t == "data") {
      body = t;
      break;
    }
    if (t.empty() || t.front() == '#') continue;
    if (t.starts_with("kernel=")) {
      kernel_line = t;
    } else if (t.starts_with("filter=")) {
      filter_line = t;
    } else {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw DataError("model file: malformed header line '" + t + "'");
      header[t.substr(0, eq)] = t.substr(eq + 1);
    }
  }
  const auto get = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw DataError(std::string("model file: missing '") + key + "'");
    return it->second;
  };
  if (body.empty()) throw DataError("model file: no data section");
  if (kernel_line.empty() || filter_line.empty()) throw DataError("model file: missing kernel or filter");
  if (get("version") != "1") throw DataError("model file: unsupported version " + get("version"));

  try {
    const KernelSpec kernel = KernelSpec::parse(kernel_line);
    const FilterSpec filter = FilterSpec::parse(filter_line);
    const double tau = parse_real(get("tau"), "tau");
    const Algorithm algorithm = parse_algorithm(get("algorithm"));
    const auto n = static_cast<Eigen::Index>(parse_integer(get("n"), "n"));
    const auto d = static_cast<Eigen::Index>(parse_integer(get("d"), "d"));
    const bool with_dec = get("decomposition") == "1";
    const bool binary = get("format") == "binary";
    if (n < 1 || d < 1) throw DataError("model file: empty training set");
    if (binary != (body == "data")) throw DataError("model file: format does not match its body");

    PointMatrix points(n, d);
    SpectralDecomposition dec;
    if (binary) {
      read_binary(in, points.data(), static_cast<std::size_t>(n * d), "points");
      if (with_dec) {
        dec.eigenvalues.resize(n);
        dec.eigenvectors.resize(n, n);
        read_binary(in, dec.eigenvalues.data(), static_cast<std::size_t>(n), "eigenvalues");
        read_binary(in, dec.eigenvectors.data(), static_cast<std::size_t>(n * n), "eigenvectors");
      }
    } else {
      read_rows_text(in, points.data(), n, d, "points");
      if (with_dec) {
        dec.eigenvalues.resize(n);
        expect_line(in, "eigenvalues");
        read_rows_text(in, dec.eigenvalues.data(), 1, n, "eigenvalues");
        expect_line(in, "eigenvectors");
        dec.eigenvectors.resize(n, n);
        // Column-major storage: row i of the file fills column i.
        read_rows_text(in, dec.eigenvectors.data(), n, n, "eigenvectors");
      }
    }
    return SupportModel::assemble(std::move(points), kernel, filter, algorithm, tau, std::move(dec));
  } catch (const UsageError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

SupportModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace kernsupp
