// hfd: fit, explain and export hierarchical functional decompositions of
// tabular (X, y) files.

#include "hfd/analytic.hpp"
#include "hfd/diagnostics.hpp"
#include "hfd/error.hpp"
#include "hfd/io.hpp"
#include "hfd/model.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

namespace fs = std::filesystem;
using namespace hfd;

namespace {

// Usage errors detected after argument parsing (exit status 2).
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::optional<ColumnRef> column_ref(const std::string& s)
{
  if (s.empty())
    return std::nullopt;
  int idx = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec == std::errc() && ptr == s.data() + s.size())
    return ColumnRef{ idx };
  return ColumnRef{ s };
}

json read_json(const fs::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

DecompositionModel load_model(const fs::path& path)
{
  return model_from_json(read_json(path));
}

std::string utc_timestamp()
{
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Parses "all", "3", "0-9" and comma-separated combinations.
std::vector<std::size_t> parse_rows(const std::string& spec, std::size_t n)
{
  std::vector<std::size_t> rows;
  if (spec == "all") {
    for (std::size_t i = 0; i < n; ++i)
      rows.push_back(i);
    return rows;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    const std::string item = spec.substr(start, comma - start);
    const std::size_t dash = item.find('-');
    try {
      const std::size_t a = std::stoul(item.substr(0, dash));
      const std::size_t b = dash == std::string::npos ? a : std::stoul(item.substr(dash + 1));
      if (b < a)
        throw UsageError("bad row range " + item);
      for (std::size_t i = a; i <= b; ++i) {
        if (i >= n)
          throw UsageError("row " + std::to_string(i) + " out of range (n = " + std::to_string(n) + ")");
        rows.push_back(i);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad row selection '" + spec + "'");
    }
    start = comma + 1;
  }
  return rows;
}

void write_json(const fs::path& path, const json& doc)
{
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  write_file_atomic(path, doc.dump(2) + "\n");
}

struct FitArgs
{
  std::string input, target, output, metrics, scaling = "tanh";
  int K = 2, d = 10, deg_density = 4;
  double clip = 0.01;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a)
{
  const Dataset data = ingest_csv(a.input, column_ref(a.target).value_or(ColumnRef{ -1 }));
  for (const auto& w : data.warnings)
    std::cerr << "warning: " << w << "\n";
  if (a.K > data.p())
    throw UsageError("--K " + std::to_string(a.K) + " exceeds the number of features (" +
                     std::to_string(data.p()) + ")");
  FitConfig cfg;
  cfg.K = a.K;
  cfg.d = a.d;
  cfg.d_density = a.deg_density;
  cfg.epsilon = a.clip;
  cfg.seed = a.seed;
  cfg.scaling = a.scaling == "none" ? Scaling::identity : Scaling::standardize_tanh;
  try {
    cfg.validate(data.p());
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  const DecompositionModel model = fit(data.X, data.y, cfg, nullptr, data.feature_names);
  for (const auto& w : model.info.warnings)
    std::cerr << "warning: " << w << "\n";
  const MetricsReport report = compute_metrics(model, data.X, data.y);

  write_json(a.output, model_to_json(model));
  json metrics = metrics_to_json(report);
  metrics["metadata"]["timestamp"] = utc_timestamp();
  metrics["metadata"]["input"] = a.input;
  metrics["metadata"]["n"] = data.n();
  metrics["metadata"]["dropped_rows"] = data.dropped_rows;
  metrics["metadata"]["config"] = { { "K", cfg.K }, { "d", cfg.d }, { "d_density", cfg.d_density },
                                    { "epsilon", cfg.epsilon }, { "seed", cfg.seed },
                                    { "scaling", a.scaling } };
  metrics["metadata"]["stage_seconds"] = model.info.stage_seconds;
  const fs::path metrics_path =
    a.metrics.empty() ? fs::path(a.output).replace_extension(".metrics.json") : fs::path(a.metrics);
  write_json(metrics_path, metrics);

  std::printf("R2            %.6f\n", report.r2);
  std::printf("MaxCorr       %.6f\n", report.max_corr);
  std::printf("support size  %zu\n", model.solve.selected_support.size() - 1);
  std::printf("fit seconds   %.3f\n", report.fit_seconds);
  if (!report.cosine_table.empty())
    std::printf("\n%s", format_cosine_table(report.cosine_table).c_str());
  std::printf("\nmodel written to %s\nmetrics written to %s\n", a.output.c_str(),
              metrics_path.string().c_str());
  return 0;
}

struct ExplainArgs
{
  std::string model, input, target, rows = "all", output;
};

int cmd_explain(const ExplainArgs& a)
{
  const DecompositionModel model = load_model(a.model);
  const Dataset data = ingest_csv(a.input, column_ref(a.target));
  const Matrix X = align_features(model, data);
  const bool has_y = data.y.size() == X.rows();
  json out;
  out["schema_version"] = schema_version;
  out["feature_names"] = model.feature_names;
  json rows = json::array();
  for (std::size_t i : parse_rows(a.rows, data.n())) {
    const Vector x = X.row(static_cast<Eigen::Index>(i)).transpose();
    const std::span<const double> s(x.data(), x.size());
    const Attribution att = has_y ? model.shapley(s, data.y(static_cast<Eigen::Index>(i))) : model.shapley(s);
    const double gap = std::abs(att.phi.sum() - (att.prediction - att.baseline));
    if (!(gap <= 1e-10 * std::max(1.0, std::abs(att.prediction))))
      throw Error("attribution efficiency violated on row " + std::to_string(i));
    rows.push_back(attribution_to_json(att, i));
  }
  out["attributions"] = std::move(rows);
  if (a.output.empty())
    std::cout << out.dump(2) << "\n";
  else
    write_json(a.output, out);
  return 0;
}

struct BenchmarkArgs
{
  std::string name, output_dir = ".";
  std::size_t n = 10000;
  std::uint64_t seed = 42;
  double rho = 0.5;
};

std::vector<double> grid(std::size_t count, bool open)
{
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k)
    g[k] = open ? -1.0 + (2.0 * k + 1.0) / static_cast<double>(count)
                : -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(count - 1);
  return g;
}

int cmd_benchmark(const BenchmarkArgs& a)
{
  const bool fgm = a.name == "fgm";
  Matrix X;
  Vector y;
  std::function<double(const Subset&, std::span<const double>)> component;
  if (fgm) {
    const FgmCase c(a.rho);
    X = c.sample(a.n, a.seed);
    y = c.target(X);
    component = [c](const Subset& s, std::span<const double> x) { return c.component(s, x); };
  } else {
    const GaussTanhCase c(a.rho);
    X = c.sample(a.n, a.seed);
    y = c.target(X);
    component = [c](const Subset& s, std::span<const double> x) { return c.component(s, x); };
  }
  const fs::path dir = a.output_dir;
  fs::create_directories(dir);
  Matrix table(X.rows(), 4);
  table << X, y;
  const fs::path csv = dir / (a.name + ".csv");
  write_csv(csv, { "x1", "x2", "x3", "y" }, table);

  // The Gaussian-tanh densities are unbounded at +-1, so its grids stay inside.
  const auto g1 = grid(200, !fgm);
  const auto g2 = grid(50, !fgm);
  json components = json::array();
  for (int j = 0; j < 3; ++j) {
    std::vector<double> values;
    for (double v : g1) {
      double x[3] = { 0.0, 0.0, 0.0 };
      x[j] = v;
      values.push_back(component({ j }, x));
    }
    components.push_back({ { "S", Subset{ j } }, { "x", g1 }, { "values", values } });
  }
  std::vector<double> v12;
  for (double u : g2)
    for (double v : g2) {
      const double x[3] = { u, v, 0.0 };
      v12.push_back(component({ 0, 1 }, x));
    }
  components.push_back({ { "S", Subset{ 0, 1 } }, { "x", g2 }, { "y", g2 }, { "values_row_major", v12 } });

  json ref = { { "schema_version", schema_version }, { "case", a.name }, { "rho", a.rho },
               { "n", a.n }, { "seed", a.seed }, { "feature_names", { "x1", "x2", "x3" } },
               { "components", components } };
  const fs::path ref_path = dir / (a.name + "_reference.json");
  write_json(ref_path, ref);
  std::printf("wrote %s (%zu rows) and %s\n", csv.string().c_str(), a.n, ref_path.string().c_str());
  return 0;
}

struct ExportArgs
{
  std::string model, input, target, output, reference;
  std::size_t rows = 20, grid_1d = 200, grid_2d = 50;
};

int cmd_export(const ExportArgs& a)
{
  const DecompositionModel model = load_model(a.model);
  const Dataset data = ingest_csv(a.input, column_ref(a.target));
  ExportOptions opt;
  opt.grid_1d = a.grid_1d;
  opt.grid_2d = a.grid_2d;
  opt.max_rows = a.rows;
  json bundle = export_bundle(model, data, opt);
  if (!a.reference.empty()) {
    const json ref = read_json(a.reference);
    check_schema_version(ref);
    bundle["references"] = ref.at("components");
  }
  write_json(a.output, bundle);
  std::printf("wrote %s: %zu main effects, %zu interactions, %zu attributions\n", a.output.c_str(),
              bundle["main_effects"].size(), bundle["interactions"].size(),
              bundle["attributions"].size());
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Hierarchical functional ANOVA decomposition of tabular data" };
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a decomposition to (X, y) in a CSV file");
  fit_cmd->add_option("--input", fa.input, "CSV with a header row")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", fa.target, "Target column name or index (default: last column)");
  fit_cmd->add_option("--K", fa.K, "Maximum interaction order")->capture_default_str();
  fit_cmd->add_option("--d", fa.d, "Maximum polynomial degree")->capture_default_str();
  fit_cmd->add_option("--deg-density", fa.deg_density, "Density expansion degree")->capture_default_str();
  fit_cmd->add_option("--density-clip", fa.clip, "Density clip floor")->capture_default_str();
  fit_cmd->add_option("--seed", fa.seed, "Seed (the fit is deterministic)")->capture_default_str();
  fit_cmd->add_option("--scaling", fa.scaling, "Feature scaling: tanh (standardize + tanh) or none")
    ->check(CLI::IsMember({ "tanh", "none" }))
    ->capture_default_str();
  fit_cmd->add_option("--output", fa.output, "Model JSON path")->required();
  fit_cmd->add_option("--metrics", fa.metrics, "Metrics JSON path (default: <output>.metrics.json)");

  ExplainArgs ea;
  auto* explain_cmd = app.add_subcommand("explain", "Per-row Shapley attributions");
  explain_cmd->add_option("--model", ea.model)->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--input", ea.input)->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--target", ea.target, "Target column, enables residuals");
  explain_cmd->add_option("--rows", ea.rows, "all, or indices and ranges such as 0-9,12")->capture_default_str();
  explain_cmd->add_option("--output", ea.output, "JSON path (default: stdout)");

  BenchmarkArgs ba;
  auto* bench_cmd = app.add_subcommand("benchmark", "Sample an analytic case with reference components");
  bench_cmd->add_option("--case", ba.name)->required()->check(CLI::IsMember({ "fgm", "gauss-tanh" }));
  bench_cmd->add_option("--n", ba.n)->capture_default_str();
  bench_cmd->add_option("--seed", ba.seed)->capture_default_str();
  bench_cmd->add_option("--rho", ba.rho)->capture_default_str();
  bench_cmd->add_option("--output-dir", ba.output_dir)->capture_default_str();

  ExportArgs xa;
  auto* export_cmd = app.add_subcommand("export-plotdata", "Write component grids and attributions for plotting");
  export_cmd->add_option("--model", xa.model)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--input", xa.input)->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--target", xa.target, "Target column, enables metrics and residuals");
  export_cmd->add_option("--output", xa.output)->required();
  export_cmd->add_option("--rows", xa.rows, "Maximum number of attribution rows")->capture_default_str();
  export_cmd->add_option("--grid-1d", xa.grid_1d)->capture_default_str();
  export_cmd->add_option("--grid-2d", xa.grid_2d)->capture_default_str();
  export_cmd->add_option("--reference", xa.reference, "Reference JSON from `hfd benchmark`");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd)
      return cmd_fit(fa);
    if (*explain_cmd)
      return cmd_explain(ea);
    if (*bench_cmd)
      return cmd_benchmark(ba);
    if (*export_cmd)
      return cmd_export(xa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
