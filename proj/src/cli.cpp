#include "kernsupp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kernsupp/error.hpp"
#include "kernsupp/estimator.hpp"
#include "kernsupp/eval.hpp"
#include "kernsupp/format.hpp"
#include "kernsupp/harness.hpp"
#include "kernsupp/io.hpp"
#include "kernsupp/oracles.hpp"
#include "kernsupp/selection.hpp"
#include "kernsupp/synth.hpp"

namespace kernsupp {

namespace {

struct ModelFlags {
  std::string kernel = "abel";
  std::string sigma = "auto";
  std::string filter = "tikhonov";
  std::string lambda = "auto";
  int m = 100;
  std::size_t rank = 0;
  double tau = 0.0;
  std::string algorithm = "auto";
  CLI::Option* sigma_option = nullptr;
};

struct DataFlags {
  std::string data;
  bool header = false;
  int label_column = -1;
  std::string task;
  std::size_t n = 200;
  double noise = 0.1;
};

struct OutputFlags {
  std::uint64_t seed = 1;
  std::string out;
  bool no_timestamp = false;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--kernel", f.kernel,
                  "abel | l1exp | gaussian | linear, or an expression such as "
                  "'product(abel(1)[0:1]*abel(2)[1:2])'")
      ->capture_default_str();
  f.sigma_option = app->add_option("--sigma", f.sigma, "bandwidth: a value, 'auto' or 'auto:k' (k-NN median)")
                       ->capture_default_str();
  app->add_option("--filter", f.filter, "tikhonov | cutoff | landweber | kpca")->capture_default_str();
  app->add_option("--lambda", f.lambda, "a value, 'auto' (spectrum curvature) or 'rate:s,b'")
      ->capture_default_str();
  app->add_option("--m", f.m, "Landweber iteration count")->capture_default_str();
  app->add_option("--rank", f.rank, "kPCA rank (instead of --lambda)");
  app->add_option("--tau", f.tau, "membership offset: x is in the estimate iff F_n(x) >= 1 - tau")
      ->capture_default_str();
  app->add_option("--algorithm", f.algorithm, "auto | spectral | cholesky | landweber")->capture_default_str();
}

void add_data_flags(CLI::App* app, DataFlags& f, bool allow_task) {
  app->add_option("--data", f.data, "CSV file of points");
  app->add_flag("--header", f.header, "the CSV file starts with a header row");
  app->add_option("--label-column", f.label_column, "0-based column holding labels");
  if (allow_task) {
    app->add_option("--task", f.task, "synthetic task instead of --data");
    app->add_option("--n", f.n, "sample size for --task")->capture_default_str();
    app->add_option("--noise", f.noise, "noise level of noisy_circle")->capture_default_str();
  }
}

void add_output_flags(CLI::App* app, OutputFlags& f) {
  app->add_option("--seed", f.seed, "random seed")->capture_default_str();
  app->add_option("--out", f.out, "output path (stdout when omitted)");
  app->add_flag("--no-timestamp", f.no_timestamp, "omit the '# generated:' line");
}

CsvOptions csv_options(const DataFlags& f) {
  CsvOptions o;
  o.header = f.header;
  if (f.label_column >= 0) o.label_column = static_cast<std::size_t>(f.label_column);
  return o;
}

Dataset load_points(const DataFlags& f, std::uint64_t seed) {
  if (!f.data.empty() && !f.task.empty()) throw UsageError("give either --data or --task, not both");
  if (!f.data.empty()) return load_csv(f.data, csv_options(f));
  if (!f.task.empty()) {
    Dataset ds;
    ds.rows = SyntheticTask::make(f.task, f.noise).sample(f.n, seed);
    ds.source = "task:" + f.task;
    return ds;
  }
  throw UsageError("no training data: pass --data <csv> or --task <name>");
}

// Output sink: a file when a path is given, else the fallback stream.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw DataError("failed writing '" + (path_.empty() ? "<stdout>" : path_) + "'");
  }

private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::string num(double v) { return CsvWriter::number(v); }
std::string bool_text(bool b) { return b ? "true" : "false"; }

double resolve_sigma(const std::string& text, PointMatrixRef points) {
  if (text == "auto" || text.starts_with("auto:")) {
    std::size_t k = 10;
    if (text.size() > 4) {
      const auto v = parse_integer(std::string_view(text).substr(5), "--sigma auto:k");
      if (v < 1) throw UsageError("--sigma auto:k needs k >= 1");
      k = static_cast<std::size_t>(v);
    }
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw UsageError("--sigma auto needs at least 2 points");
    return width_heuristic(points, std::min(k, n - 1));
  }
  return parse_real(text, "--sigma");
}

KernelSpec resolve_kernel(const ModelFlags& f, PointMatrixRef points, std::ostream* err) {
  KernelSpec k = KernelSpec::linear();
  const std::string& name = f.kernel;
  if (name == "abel") {
    k = KernelSpec::abel(resolve_sigma(f.sigma, points));
  } else if (name == "l1exp" || name == "l1_exponential") {
    k = KernelSpec::l1_exponential(resolve_sigma(f.sigma, points));
  } else if (name == "gaussian") {
    k = KernelSpec::gaussian(resolve_sigma(f.sigma, points));
  } else if (name != "linear") {
    k = KernelSpec::parse(name);
    if (k.has_bandwidth() && f.sigma_option && f.sigma_option->count() > 0) {
      k = k.with_sigma(resolve_sigma(f.sigma, points));
    }
  }
  if (!k.unit_diagonal()) {
    if (err) *err << "note: kernel " << k.expression() << " lacks a unit diagonal; using its normalization\n";
    k = normalize(k);
  }
  if (err && k.separation() == Separation::None) {
    *err << "warning: the Gaussian kernel does not separate closed sets; support estimates may be biased\n";
  }
  return k;
}

double resolve_lambda(const std::string& text, const Vector& eigenvalues, double n) {
  if (text == "auto") return lambda_curvature(eigenvalues);
  if (text.starts_with("rate:")) {
    const auto parts = split(std::string_view(text).substr(5), ',');
    if (parts.size() != 2) throw UsageError("--lambda rate:s,b expects two numbers");
    return rate_lambda(n, parse_real(trim(parts[0]), "s"), parse_real(trim(parts[1]), "b"));
  }
  return parse_real(text, "--lambda");
}

FilterSpec resolve_filter_flags(const ModelFlags& f, const Vector& eigenvalues, double n) {
  if (f.filter.find('=') != std::string::npos) return FilterSpec::parse(f.filter);
  if (f.filter == "landweber") return FilterSpec::landweber(f.m);
  if (f.filter == "kpca" && f.rank > 0) return FilterSpec::kpca_rank(f.rank);
  const double lambda = resolve_lambda(f.lambda, eigenvalues, n);
  if (f.filter == "tikhonov") return FilterSpec::tikhonov(lambda);
  if (f.filter == "cutoff" || f.filter == "spectral_cutoff") return FilterSpec::spectral_cutoff(lambda);
  if (f.filter == "kpca") return FilterSpec::kpca(lambda);
  throw UsageError("unknown filter '" + f.filter + "'");
}

// Fits with the decomposition computed once; automatic parameters are
// resolved against it.
SupportModel fit_from_flags(const ModelFlags& f, PointMatrixRef points, const KernelSpec& k) {
  const auto base = fit(points, k, FilterSpec::tikhonov(1.0), Algorithm::Spectral);
  const FilterSpec filter =
      resolve_filter_flags(f, base.decomposition().eigenvalues, static_cast<double>(points.rows()));
  return base.with_filter(filter, parse_algorithm(f.algorithm)).with_tau(f.tau);
}

void write_model_meta(CsvWriter& w, const SupportModel& m) {
  w.meta("kernel", m.kernel().expression());
  w.meta("filter", m.filter().to_string());
  w.meta("algorithm", to_string(m.algorithm()));
  w.meta("n_train", std::to_string(m.size()));
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.starts_with("logspace:")) {
    const auto p = split(std::string_view(text).substr(9), ',');
    if (p.size() != 3) throw UsageError(what + ": logspace:a,b,k expects three numbers");
    const double a = parse_real(trim(p[0]), what);
    const double b = parse_real(trim(p[1]), what);
    const auto k = parse_integer(trim(p[2]), what);
    if (k < 1) throw UsageError(what + ": logspace needs k >= 1");
    for (long long i = 0; i < k; ++i) {
      const double t = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
      out.push_back(std::pow(10.0, a + (b - a) * t));
    }
    return out;
  }
  for (const auto& field : split(text, ',')) {
    const auto t = trim(field);
    if (!t.empty()) out.push_back(parse_real(t, what));
  }
  if (out.empty()) throw UsageError(what + ": empty grid");
  return out;
}

// ---- train ----------------------------------------------------------------

struct TrainFlags {
  ModelFlags model;
  DataFlags data;
  OutputFlags output;
  std::string spectrum;
  std::string format = "text";
};

void cmd_train(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  if (f.output.out.empty()) throw UsageError("train needs --out <model file>");
  const Dataset ds = load_points(f.data, f.output.seed);
  const KernelSpec k = resolve_kernel(f.model, ds.rows, &err);
  const SupportModel model = fit_from_flags(f.model, ds.rows, k);
  save_model(model, f.output.out, {f.format == "binary" ? ModelFormat::Binary : ModelFormat::Text, true});

  const std::string spectrum_path = f.spectrum.empty() ? f.output.out + ".spectrum.csv" : f.spectrum;
  const auto& ev = model.decomposition().eigenvalues;
  {
    Sink sink(spectrum_path, out);
    CsvWriter w(sink.get());
    w.timestamp(!f.output.no_timestamp);
    w.meta("source", ds.source);
    w.meta("kernel", k.expression());
    w.header({"index", "eigenvalue"});
    for (Eigen::Index j = 0; j < ev.size(); ++j) w.row({std::to_string(j), num(ev(j))});
    sink.finish();
  }

  out << "model: " << f.output.out << "\n";
  out << "points: " << model.size() << " x " << model.dimension() << "\n";
  out << "kernel: " << k.expression() << "\n";
  out << "filter: " << model.filter().to_string() << "\n";
  out << "algorithm: " << to_string(model.algorithm()) << "\n";
  out << "tau: " << num(model.tau()) << "\n";
  out << "spectrum: largest " << num(ev(0)) << ", smallest " << num(ev(ev.size() - 1)) << ", trace "
      << num(ev.sum()) << " -> " << spectrum_path << "\n";
  if (model.filter().kind() != FilterSpec::Kind::Landweber) {
    out << "effective dimension: " << num(effective_dimension(ev, model.filter().lambda())) << "\n";
  }
}

// ---- score ----------------------------------------------------------------

struct ScoreFlags {
  std::string model;
  DataFlags data;
  OutputFlags output;
  std::optional<double> tau;
};

SupportModel load_model_checked(const std::string& path, const Dataset& ds) {
  SupportModel model = load_model(path);
  if (ds.dimension() != model.dimension()) {
    throw DataError(ds.source + ": points have dimension " + std::to_string(ds.dimension()) +
                    ", the model expects " + std::to_string(model.dimension()));
  }
  return model;
}

void cmd_score(const ScoreFlags& f, std::ostream& out) {
  if (f.data.data.empty()) throw UsageError("score needs --data <csv>");
  const Dataset ds = load_csv(f.data.data, csv_options(f.data));
  const SupportModel model = load_model_checked(f.model, ds);
  const double tau = f.tau.value_or(model.tau());
  if (!(tau >= 0.0 && tau < 1.0)) throw UsageError("--tau must lie in [0, 1)");
  const Vector s = score_batch(model, ds.rows);

  Sink sink(f.output.out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("model", f.model);
  write_model_meta(w, model);
  w.meta("tau", num(tau));
  w.header({"index", "score", "member"});
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    w.row({std::to_string(i), num(s(i)), bool_text(is_member(s(i), tau))});
  }
  sink.finish();
}

// ---- eval -----------------------------------------------------------------

struct EvalFlags {
  ModelFlags model;
  DataFlags data;
  OutputFlags output;
  std::string model_path;
  std::size_t trials = 1;
  std::size_t test_n = 200;
  std::size_t grid = 61;
  std::size_t reference_n = 1000;
  std::string negative_task;
  double positive_label = 1.0;
  std::string roc;
};

struct TrialMetrics {
  double spectral_auc = 0.0;
  double parzen_auc = 0.0;
  double hausdorff = 0.0;
  double symdiff = 0.0;
  std::size_t estimate_size = 0;
  RocResult roc;
};

double auc_of(const Vector& pos, const Vector& neg, RocResult* keep = nullptr) {
  auto r = roc_auc(std::span<const double>(pos.data(), static_cast<std::size_t>(pos.size())),
                   std::span<const double>(neg.data(), static_cast<std::size_t>(neg.size())));
  const double auc = r.auc;
  if (keep) *keep = std::move(r);
  return auc;
}

double parzen_width(const KernelSpec& k, PointMatrixRef train) {
  if (k.has_bandwidth()) return k.sigma();
  return resolve_sigma("auto", train);
}

// Negatives for a task without a partner task: uniform draws from the
// padded bounding box, farther from the support than the grid thickening.
PointMatrix off_support(const SyntheticTask& task, std::size_t count, double margin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector lo = task.box_lower();
  Vector hi = task.box_upper();
  const Vector pad = 0.5 * (hi - lo);
  lo -= pad;
  hi += pad;
  PointMatrix out(static_cast<Eigen::Index>(count), task.dimension());
  Point x(task.dimension());
  for (Eigen::Index i = 0; i < out.rows();) {
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = lo(k) + (hi(k) - lo(k)) * unit(rng);
    if (task.distance_to_support(x) > margin) out.row(i++) = x.transpose();
  }
  return out;
}

TrialMetrics eval_trial(const EvalFlags& f, const SyntheticTask& task, const ReferenceGrid& grid,
                        const PointMatrix& support, std::uint64_t trial, std::ostream* err) {
  const std::uint64_t seed = f.output.seed;
  const PointMatrix x = task.sample(f.data.n, stream_seed(seed, 3 * trial));
  const PointMatrix pos = task.sample(f.test_n, stream_seed(seed, 3 * trial + 1));
  const double margin = task.full_dimensional() ? grid.step : grid.step + 3.0 * task.noise();
  const PointMatrix neg = f.negative_task.empty()
                              ? off_support(task, f.test_n, margin, stream_seed(seed, 3 * trial + 2))
                              : SyntheticTask::make(f.negative_task, f.data.noise)
                                    .sample(f.test_n, stream_seed(seed, 3 * trial + 2));
  if (neg.cols() != x.cols()) throw UsageError("--negative-task has a different dimension");

  const KernelSpec k = resolve_kernel(f.model, x, err);
  const SupportModel model = fit_from_flags(f.model, x, k);
  TrialMetrics m;
  m.spectral_auc = auc_of(score_batch(model, pos), score_batch(model, neg), &m.roc);
  const double h = parzen_width(k, x);
  m.parzen_auc = auc_of(parzen_scores(x, h, pos), parzen_scores(x, h, neg));

  const Vector g = score_batch(model, grid.points);
  std::vector<std::uint8_t> inside(grid.inside.size());
  std::vector<Eigen::Index> members;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    inside[static_cast<std::size_t>(i)] = is_member(g(i), model.tau());
    if (inside[static_cast<std::size_t>(i)]) members.push_back(i);
  }
  m.estimate_size = members.size();
  if (members.empty()) {
    m.hausdorff = std::numeric_limits<double>::infinity();
  } else {
    PointMatrix estimate(static_cast<Eigen::Index>(members.size()), grid.points.cols());
    for (std::size_t i = 0; i < members.size(); ++i) {
      estimate.row(static_cast<Eigen::Index>(i)) = grid.points.row(members[i]);
    }
    m.hausdorff = hausdorff(estimate, support);
  }
  m.symdiff = symdiff_measure(inside, grid.inside, grid.cell_volume);
  return m;
}

void write_roc(const std::string& path, const RocResult& roc, const OutputFlags& o, std::ostream& out) {
  Sink sink(path, out);
  CsvWriter w(sink.get());
  w.timestamp(!o.no_timestamp);
  w.meta("auc", num(roc.auc));
  w.header({"threshold", "fpr", "tpr"});
  for (const auto& p : roc.points) w.row({num(p.threshold), num(p.false_positive_rate), num(p.true_positive_rate)});
  sink.finish();
}

void eval_model(const EvalFlags& f, std::ostream& out) {
  if (f.data.data.empty()) throw UsageError("eval --model needs labelled --data");
  const Dataset ds = load_csv(f.data.data, csv_options(f.data));
  if (!ds.labels) throw DataError(ds.source + ": missing labels (pass --label-column)");
  const SupportModel model = load_model_checked(f.model_path, ds);
  const Vector s = score_batch(model, ds.rows);
  const double h = parzen_width(model.kernel(), model.training_points());
  const Vector p = parzen_scores(model.training_points(), h, ds.rows);
  std::vector<LabeledScore> ls, lp;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const bool positive = (*ds.labels)[static_cast<std::size_t>(i)] == f.positive_label;
    ls.push_back({s(i), positive});
    lp.push_back({p(i), positive});
  }
  const auto npos = std::count_if(ls.begin(), ls.end(), [](const LabeledScore& l) { return l.positive; });
  if (npos == 0 || npos == static_cast<long>(ls.size())) {
    throw DataError(ds.source + ": labels hold a single class; AUC needs both");
  }
  const RocResult roc = roc_auc(ls);

  Sink sink(f.output.out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("model", f.model_path);
  write_model_meta(w, model);
  w.meta("data", ds.source);
  w.meta("parzen_width", num(h));
  w.header({"trial", "positives", "negatives", "spectral_auc", "parzen_auc"});
  w.row({"model", std::to_string(npos), std::to_string(static_cast<long>(ls.size()) - npos), num(roc.auc),
         num(roc_auc(lp).auc)});
  sink.finish();
  if (!f.roc.empty()) write_roc(f.roc, roc, f.output, out);
}

void cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  if (!f.model_path.empty()) return eval_model(f, out);
  if (f.data.task.empty()) throw UsageError("eval needs --task <name> or --model with --data");
  if (f.trials == 0) throw UsageError("--trials must be positive");
  const auto task = SyntheticTask::make(f.data.task, f.data.noise);
  const auto grid = reference_grid(task, f.grid);
  const PointMatrix support = task.reference_support(f.reference_n);

  std::vector<TrialMetrics> rows;
  for (std::size_t t = 0; t < f.trials; ++t) {
    rows.push_back(eval_trial(f, task, grid, support, t, t == 0 ? &err : nullptr));
  }

  Sink sink(f.output.out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("task", task.name());
  w.meta("n", std::to_string(f.data.n));
  w.meta("test_n", std::to_string(f.test_n));
  w.meta("negatives", f.negative_task.empty() ? "off-support box draws" : "task:" + f.negative_task);
  w.meta("grid", std::to_string(f.grid) + " per axis");
  w.meta("seed", std::to_string(f.output.seed));
  w.meta("kernel", f.model.kernel + " sigma=" + f.model.sigma);
  w.meta("filter", f.model.filter + " lambda=" + f.model.lambda + " m=" + std::to_string(f.model.m));
  w.meta("tau", num(f.model.tau));
  const std::vector<std::string> columns = {"spectral_auc", "parzen_auc", "hausdorff", "symdiff", "estimate_size"};
  std::vector<std::string> header = {"trial"};
  header.insert(header.end(), columns.begin(), columns.end());
  w.header(header);
  auto values = [](const TrialMetrics& m) {
    return std::vector<double>{m.spectral_auc, m.parzen_auc, m.hausdorff, m.symdiff,
                               static_cast<double>(m.estimate_size)};
  };
  std::vector<double> mean(columns.size(), 0.0), sq(columns.size(), 0.0);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto v = values(rows[t]);
    std::vector<std::string> fields = {std::to_string(t)};
    for (std::size_t c = 0; c < v.size(); ++c) {
      fields.push_back(num(v[c]));
      mean[c] += v[c] / static_cast<double>(rows.size());
    }
    w.row(fields);
  }
  for (const auto& r : rows) {
    const auto v = values(r);
    for (std::size_t c = 0; c < v.size(); ++c) sq[c] += (v[c] - mean[c]) * (v[c] - mean[c]);
  }
  // sample standard deviation (T - 1 denominator)
  std::vector<std::string> mean_row = {"mean"}, std_row = {"std"};
  for (std::size_t c = 0; c < columns.size(); ++c) {
    mean_row.push_back(num(mean[c]));
    const double var = rows.size() > 1 ? sq[c] / static_cast<double>(rows.size() - 1) : 0.0;
    std_row.push_back(num(std::isfinite(mean[c]) ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN()));
  }
  w.row(mean_row);
  w.row(std_row);
  sink.finish();
  if (!f.roc.empty()) write_roc(f.roc, rows.front().roc, f.output, out);
}

// ---- sweep ----------------------------------------------------------------

struct SweepFlags {
  ModelFlags model;
  DataFlags data;
  OutputFlags output;
  std::string lambdas = "logspace:-4,0,5";
  std::string ms = "1,10,100";
  std::string taus = "0,0.05,0.1";
  std::string test;
};

void cmd_sweep(const SweepFlags& f, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_points(f.data, f.output.seed);
  const KernelSpec k = resolve_kernel(f.model, ds.rows, &err);
  const auto base = fit(ds.rows, k, FilterSpec::tikhonov(1.0), Algorithm::Spectral);
  const Dataset test = f.test.empty() ? ds : load_csv(f.test);
  if (test.dimension() != ds.dimension()) throw DataError(test.source + ": dimension differs from training data");

  std::vector<FilterSpec> filters;
  std::string parameter = "lambda";
  if (f.model.filter == "landweber") {
    parameter = "m";
    for (double m : parse_grid(f.ms, "--ms")) {
      if (m != std::floor(m) || m < 0) throw UsageError("--ms: iteration counts must be non-negative integers");
      filters.push_back(FilterSpec::landweber(static_cast<int>(m)));
    }
  } else {
    if (f.model.filter == "kpca" && f.model.rank > 0) throw UsageError("sweep varies lambda; drop --rank");
    for (double l : parse_grid(f.lambdas, "--lambdas")) {
      ModelFlags one = f.model;
      one.lambda = format_real(l);
      filters.push_back(resolve_filter_flags(one, base.decomposition().eigenvalues, static_cast<double>(ds.size())));
    }
  }
  const auto taus = parse_grid(f.taus, "--taus");
  for (double t : taus) {
    if (!(t >= 0.0 && t < 1.0)) throw UsageError("--taus: values must lie in [0, 1)");
  }
  const Matrix scores = regularization_path(base, test.rows, filters);

  Sink sink(f.output.out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("source", ds.source);
  w.meta("kernel", k.expression());
  w.meta("filter", f.model.filter);
  w.meta("grid", std::to_string(filters.size()) + " " + parameter + " x " + std::to_string(taus.size()) + " tau");
  w.meta("points", std::to_string(test.size()));
  w.header({parameter, "tau", "index", "score", "member"});
  for (std::size_t j = 0; j < filters.size(); ++j) {
    const std::string p = parameter == "m" ? std::to_string(filters[j].iterations()) : num(filters[j].lambda());
    for (double t : taus) {
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double s = scores(i, static_cast<Eigen::Index>(j));
        w.row({p, num(t), std::to_string(i), num(s), bool_text(is_member(s, t))});
      }
    }
  }
  sink.finish();
}

// ---- synth ----------------------------------------------------------------

struct SynthFlags {
  DataFlags data;
  OutputFlags output;
  std::size_t grid = 0;
  std::string grid_out;
};

void cmd_synth(const SynthFlags& f, std::ostream& out) {
  if (f.data.task.empty()) throw UsageError("synth needs --task <name>");
  const auto task = SyntheticTask::make(f.data.task, f.data.noise);
  if (f.grid > 0 && f.grid_out.empty()) throw UsageError("--grid needs --grid-out <csv>");
  const PointMatrix p = task.sample(f.data.n, f.output.seed);
  {
    Sink sink(f.output.out, out);
    write_points_csv(sink.get(), p,
                     {{"task", task.name()},
                      {"n", std::to_string(f.data.n)},
                      {"seed", std::to_string(f.output.seed)},
                      {"noise", num(task.noise())}},
                     !f.output.no_timestamp);
    sink.finish();
  }
  if (f.grid == 0) return;
  const auto g = reference_grid(task, f.grid);
  Sink sink(f.grid_out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("task", task.name());
  w.meta("resolution", std::to_string(g.resolution));
  w.meta("step", num(g.step));
  w.meta("cell_volume", num(g.cell_volume));
  std::vector<std::string> header;
  for (Eigen::Index c = 0; c < g.points.cols(); ++c) header.push_back("x" + std::to_string(c));
  header.push_back("inside");
  w.header(header);
  for (Eigen::Index i = 0; i < g.points.rows(); ++i) {
    std::vector<std::string> fields;
    for (Eigen::Index c = 0; c < g.points.cols(); ++c) fields.push_back(num(g.points(i, c)));
    fields.push_back(std::to_string(g.inside[static_cast<std::size_t>(i)]));
    w.row(fields);
  }
  sink.finish();
}

// ---- verify-bounds --------------------------------------------------------

struct BoundsFlags {
  ModelFlags model;
  OutputFlags output;
  std::string harness = "all";
  std::string task = "circle";
  double noise = 0.1;
  std::size_t n = 100;
  double delta = 2.0;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> reference_n;
};

void cmd_verify_bounds(const BoundsFlags& f, std::ostream& out, std::ostream& err) {
  const bool all = f.harness == "all";
  const auto task = SyntheticTask::make(f.task, f.noise);
  // an automatic bandwidth comes from a pilot sample of the same size
  const PointMatrix pilot = task.sample(f.n, stream_seed(f.output.seed, 999));
  const KernelSpec k = resolve_kernel(f.model, pilot, &err);

  std::vector<HarnessResult> results;
  if (all || f.harness == "concentration") {
    ConcentrationConfig c;
    c.n = f.n;
    c.delta = f.delta;
    c.seed = f.output.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.reference_n) c.reference_n = *f.reference_n;
    results.push_back(concentration_harness(task, k, c));
  }
  if (all || f.harness == "bernstein") {
    BernsteinConfig c;
    c.n = f.n;
    c.delta = f.delta;
    c.seed = f.output.seed;
    if (f.trials) c.trials = *f.trials;
    results.push_back(bernstein_coin_harness(c));
  }
  if (all || f.harness == "sample-error") {
    SampleErrorConfig c;
    c.n = f.n;
    c.delta = f.delta;
    c.seed = f.output.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.reference_n) c.reference_n = *f.reference_n;
    if (f.model.lambda == "auto") throw UsageError("sample-error needs a numeric --lambda or rate:s,b");
    c.lambda = resolve_lambda(f.model.lambda, Vector(), static_cast<double>(f.n));
    results.push_back(sample_error_harness(task, k, c));
  }

  Sink sink(f.output.out, out);
  CsvWriter w(sink.get());
  w.timestamp(!f.output.no_timestamp);
  w.meta("task", task.name());
  w.meta("kernel", k.expression());
  w.meta("seed", std::to_string(f.output.seed));
  for (const auto& r : results) {
    w.meta(r.name, "violations " + num(r.violation_fraction) + ", allowed " + num(r.allowed_fraction) +
                       (r.passed() ? ", ok" : ", EXCEEDED") + (r.note.empty() ? "" : "; " + r.note));
  }
  w.header({"harness", "trial", "n", "delta", "observed", "bound", "violated"});
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      w.row({r.name, std::to_string(row.trial), std::to_string(row.n), num(row.delta), num(row.observed),
             num(row.bound), bool_text(row.violated)});
    }
  }
  sink.finish();
  for (const auto& r : results) {
    err << r.name << ": violation fraction " << num(r.violation_fraction) << " (allowed "
        << num(r.allowed_fraction) << ")\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Support estimation with kernel spectral regularization", "kernsupp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kernsupp 0.1.0");

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "fit a model and save it");
  add_model_flags(train_cmd, train.model);
  add_data_flags(train_cmd, train.data, true);
  add_output_flags(train_cmd, train.output);
  train_cmd->add_option("--spectrum", train.spectrum, "eigenvalue CSV (default <out>.spectrum.csv)");
  train_cmd->add_option("--format", train.format, "model file format")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "score points with a saved model");
  score_cmd->add_option("--model", score.model, "model file")->required();
  add_data_flags(score_cmd, score.data, false);
  add_output_flags(score_cmd, score.output);
  score_cmd->add_option("--tau", score.tau, "override the model's tau");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "AUC, Hausdorff and symmetric-difference metrics");
  add_model_flags(eval_cmd, eval.model);
  add_data_flags(eval_cmd, eval.data, true);
  add_output_flags(eval_cmd, eval.output);
  eval_cmd->add_option("--model", eval.model_path, "evaluate a saved model on labelled --data");
  eval_cmd->add_option("--trials", eval.trials, "independent trials")->capture_default_str();
  eval_cmd->add_option("--test-n", eval.test_n, "positives and negatives per trial")->capture_default_str();
  eval_cmd->add_option("--grid", eval.grid, "reference grid points per axis")->capture_default_str();
  eval_cmd->add_option("--reference-n", eval.reference_n, "support discretization size")->capture_default_str();
  eval_cmd->add_option("--negative-task", eval.negative_task, "task drawing the negatives");
  eval_cmd->add_option("--positive-label", eval.positive_label, "label value of positives")->capture_default_str();
  eval_cmd->add_option("--roc", eval.roc, "ROC curve CSV (first trial)");

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "scores over a lambda x tau grid from one decomposition");
  add_model_flags(sweep_cmd, sweep.model);
  add_data_flags(sweep_cmd, sweep.data, true);
  add_output_flags(sweep_cmd, sweep.output);
  sweep_cmd->add_option("--lambdas", sweep.lambdas, "comma list or logspace:a,b,k")->capture_default_str();
  sweep_cmd->add_option("--ms", sweep.ms, "Landweber iteration counts")->capture_default_str();
  sweep_cmd->add_option("--taus", sweep.taus, "comma list of tau values")->capture_default_str();
  sweep_cmd->add_option("--test", sweep.test, "points to score (default: the training points)");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "sample a synthetic task");
  add_data_flags(synth_cmd, synth.data, true);
  add_output_flags(synth_cmd, synth.output);
  synth_cmd->add_option("--grid", synth.grid, "also write a reference grid with this resolution");
  synth_cmd->add_option("--grid-out", synth.grid_out, "reference grid CSV");

  BoundsFlags bounds;
  bounds.model.sigma = "1";
  bounds.model.lambda = "0.1";
  auto* bounds_cmd = app.add_subcommand("verify-bounds", "Monte-Carlo check of the probabilistic bounds");
  add_model_flags(bounds_cmd, bounds.model);
  add_output_flags(bounds_cmd, bounds.output);
  bounds_cmd->add_option("--harness", bounds.harness, "concentration | bernstein | sample-error | all")
      ->check(CLI::IsMember({"concentration", "bernstein", "sample-error", "all"}))
      ->capture_default_str();
  bounds_cmd->add_option("--task", bounds.task, "sampling task")->capture_default_str();
  bounds_cmd->add_option("--noise", bounds.noise, "noise level of noisy_circle")->capture_default_str();
  bounds_cmd->add_option("--n", bounds.n, "sample size")->capture_default_str();
  bounds_cmd->add_option("--delta", bounds.delta, "confidence parameter")->capture_default_str();
  bounds_cmd->add_option("--trials", bounds.trials, "trials per harness");
  bounds_cmd->add_option("--reference-n", bounds.reference_n, "reference sample size");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
    }
    if (*train_cmd) cmd_train(train, out, err);
    if (*score_cmd) cmd_score(score, out);
    if (*eval_cmd) cmd_eval(eval, out, err);
    if (*sweep_cmd) cmd_sweep(sweep, out, err);
    if (*synth_cmd) cmd_synth(synth, out);
    if (*bounds_cmd) cmd_verify_bounds(bounds, out, err);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return static_cast<int>(ErrorKind::Numeric);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::Numeric);
  }
}

}  // namespace kernsupp
