#include "hfd/io.hpp"

#include "hfd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hfd {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
    out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_line(const std::string& line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos)
      break;
    start = pos + 1;
  }
  return out;
}

enum class Cell
{
  ok,
  missing,
  invalid
};

Cell parse_cell(const std::string& s, double& value)
{
  if (s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null")
    return Cell::missing;
  const char* first = s.data();
  if (*first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    return Cell::invalid;
  if (!std::isfinite(value))
    return Cell::missing;
  return Cell::ok;
}

std::string format_double(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json subset_json(const Subset& s)
{
  return json(s);
}

Subset subset_from(const json& j, int p)
{
  return canonical_subset(j.get<Subset>(), p);
}

const char* scaling_name(Scaling s)
{
  return s == Scaling::identity ? "identity" : "standardize_tanh";
}

std::vector<double> to_std(const Vector& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector to_eigen(const std::vector<double>& v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> linspace(double lo, double hi, std::size_t count)
{
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

} // namespace

Dataset ingest_csv(const fs::path& path, const std::optional<ColumnRef>& target)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw InputError(path.string() + " is empty (a header row is required)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  const std::vector<std::string> header = split_line(line);
  const int columns = static_cast<int>(header.size());

  int target_col = -1;
  if (target) {
    if (const auto* name = std::get_if<std::string>(&*target)) {
      auto it = std::find(header.begin(), header.end(), *name);
      if (it == header.end())
        throw InputError("target column '" + *name + "' not found in " + path.string());
      target_col = static_cast<int>(it - header.begin());
    } else {
      int idx = std::get<int>(*target);
      if (idx < 0)
        idx += columns;
      if (idx < 0 || idx >= columns)
        throw InputError("target column index out of range");
      target_col = idx;
    }
  }

  Dataset data;
  data.source_path = path;
  for (int c = 0; c < columns; ++c)
    if (c != target_col)
      data.feature_names.push_back(header[c]);

  std::vector<double> xs, ys;
  std::vector<double> row(columns);
  std::size_t line_no = 1, invalid = 0, missing = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != columns) {
      ++invalid;
      data.warnings.push_back("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " fields, found " +
                              std::to_string(cells.size()));
      continue;
    }
    Cell status = Cell::ok;
    for (int c = 0; c < columns && status == Cell::ok; ++c)
      status = parse_cell(cells[c], row[c]);
    if (status != Cell::ok) {
      if (status == Cell::invalid) {
        ++invalid;
        data.warnings.push_back("line " + std::to_string(line_no) + ": non-numeric cell");
      } else {
        ++missing;
      }
      continue;
    }
    for (int c = 0; c < columns; ++c)
      (c == target_col ? ys : xs).push_back(row[c]);
  }
  data.dropped_rows = invalid + missing;
  if (missing > 0)
    data.warnings.push_back("dropped " + std::to_string(missing) + " rows with missing values");

  const Eigen::Index p = static_cast<Eigen::Index>(data.feature_names.size());
  const Eigen::Index n = p > 0 ? static_cast<Eigen::Index>(xs.size()) / p
                               : static_cast<Eigen::Index>(ys.size());
  data.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
    xs.data(), n, p);
  data.y = to_eigen(ys);
  if (n < 2)
    throw InputError(path.string() + " has fewer than two usable rows");
  return data;
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const Matrix& columns)
{
  if (static_cast<Eigen::Index>(header.size()) != columns.cols())
    throw DimensionError("CSV header and column count differ");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out += (c ? "," : "") + header[c];
  out += '\n';
  for (Eigen::Index i = 0; i < columns.rows(); ++i) {
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
      if (c)
        out += ',';
      out += format_double(columns(i, c));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void check_schema_version(const json& doc)
{
  if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_string())
    throw SchemaError("document has no schema_version");
  const std::string v = doc["schema_version"].get<std::string>();
  const std::string major = v.substr(0, v.find('.'));
  const std::string ours = std::string(schema_version).substr(0, 1);
  if (major != ours)
    throw SchemaError("unsupported schema_version " + v + " (expected " + ours + ".x)");
}

json model_to_json(const DecompositionModel& model)
{
  if (!model.density)
    throw SchemaError("models fitted on external marginals cannot be serialized");
  json doc;
  doc["schema_version"] = schema_version;
  doc["p"] = model.p();
  doc["feature_names"] = model.feature_names;
  doc["scaler"] = { { "kind", scaling_name(model.scaler.kind) },
                    { "means", to_std(model.scaler.means) },
                    { "stds", to_std(model.scaler.stds) } };

  json subsets = json::array();
  for (const auto& [s, coeffs] : model.density->all_coefficients())
    subsets.push_back({ { "S", subset_json(s) }, { "coeffs_row_major", coeffs } });
  doc["density"] = { { "d_density", model.density->degree() },
                     { "epsilon", model.density->clip_floor() },
                     { "subsets", subsets } };
  doc["truncation"] = { { "K", model.K },
                        { "d", model.d },
                        { "ordering", "by |S|, then lexicographic S, then lexicographic degrees; "
                                      "column 0 is the empty set" } };

  json support = json::array(), coefficients = json::array(), offsets = json::array();
  for (const auto& c : model.components) {
    for (std::size_t t = 0; t < c.coefficients.size(); ++t) {
      support.push_back({ { "S", subset_json(c.subset) }, { "degrees", c.degrees[t] } });
      coefficients.push_back(c.coefficients[t]);
    }
    offsets.push_back({ { "S", subset_json(c.subset) }, { "value", c.offset } });
  }
  doc["support"] = support;
  doc["coefficients"] = coefficients;
  doc["offsets"] = offsets;
  doc["nu_empty"] = model.nu_empty;
  doc["solve"] = { { "selected_columns", model.solve.selected_support },
                   { "refit_coefficients", to_std(model.solve.coefficients) },
                   { "bic_values", model.solve.bic_values },
                   { "selected_step", model.solve.selected_step },
                   { "path_steps", model.solve.path_steps },
                   { "rank", model.solve.rank },
                   { "skipped_columns", model.solve.skipped_columns } };
  return doc;
}

DecompositionModel model_from_json(const json& doc)
{
  check_schema_version(doc);
  try {
    DecompositionModel model;
    const int p = doc.at("p").get<int>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    if (static_cast<int>(model.feature_names.size()) != p)
      throw SchemaError("feature_names length does not match p");
    const auto& sc = doc.at("scaler");
    const std::string kind = sc.at("kind").get<std::string>();
    if (kind == "identity")
      model.scaler.kind = Scaling::identity;
    else if (kind == "standardize_tanh")
      model.scaler.kind = Scaling::standardize_tanh;
    else
      throw SchemaError("unknown scaler kind " + kind);
    model.scaler.means = to_eigen(sc.at("means").get<std::vector<double>>());
    model.scaler.stds = to_eigen(sc.at("stds").get<std::vector<double>>());
    if (model.scaler.p() != p || model.scaler.stds.size() != p)
      throw SchemaError("scaler dimension does not match p");

    const auto& dj = doc.at("density");
    DensityModel density(dj.at("d_density").get<int>(), dj.at("epsilon").get<double>());
    for (const auto& entry : dj.at("subsets"))
      density.set_coefficients(subset_from(entry.at("S"), p),
                               entry.at("coeffs_row_major").get<std::vector<double>>());
    model.density = density;
    model.marginals = std::make_shared<DensityModel>(density);

    model.K = doc.at("truncation").at("K").get<int>();
    model.d = doc.at("truncation").at("d").get<int>();

    const auto& support = doc.at("support");
    const auto& coefficients = doc.at("coefficients");
    if (support.size() != coefficients.size())
      throw SchemaError("support and coefficients differ in length");
    for (std::size_t t = 0; t < support.size(); ++t) {
      TensorIndex index{ subset_from(support[t].at("S"), p),
                         support[t].at("degrees").get<std::vector<int>>() };
      validate_index(index, p);
      if (static_cast<int>(index.order()) > model.K ||
          std::any_of(index.degrees.begin(), index.degrees.end(),
                      [&](int m) { return m > model.d; }))
        throw SchemaError("support index outside the truncation set");
      if (!model.density->contains(index.subset))
        throw SchemaError("no density stored for subset " + subset_to_string(index.subset));
      if (model.components.empty() || model.components.back().subset != index.subset)
        model.components.push_back(Component{ index.subset, {}, {}, 0.0 });
      model.components.back().degrees.push_back(index.degrees);
      model.components.back().coefficients.push_back(coefficients[t].get<double>());
    }
    for (const auto& off : doc.at("offsets")) {
      const Subset s = subset_from(off.at("S"), p);
      auto it = std::find_if(model.components.begin(), model.components.end(),
                             [&](const Component& c) { return c.subset == s; });
      if (it == model.components.end())
        throw SchemaError("offset for unselected subset " + subset_to_string(s));
      it->offset = off.at("value").get<double>();
    }
    model.nu_empty = doc.at("nu_empty").get<double>();

    if (doc.contains("solve")) {
      const auto& sj = doc["solve"];
      model.solve.selected_support = sj.value("selected_columns", std::vector<std::size_t>{});
      model.solve.coefficients = to_eigen(sj.value("refit_coefficients", std::vector<double>{}));
      model.solve.bic_values = sj.value("bic_values", std::vector<double>{});
      model.solve.selected_step = sj.value("selected_step", std::size_t{ 0 });
      model.solve.path_steps = sj.value("path_steps", std::size_t{ 0 });
      model.solve.rank = sj.value("rank", 0);
      model.solve.skipped_columns = sj.value("skipped_columns", std::vector<std::size_t>{});
    }
    return model;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  } catch (const IndexError& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
}

json metrics_to_json(const MetricsReport& report)
{
  json table = json::array();
  for (const auto& e : report.cosine_table)
    table.push_back({ { "S", subset_json(e.S) },
                      { "T", subset_json(e.T) },
                      { "cosine", e.cosine },
                      { "degenerate", e.degenerate } });
  json shares = json::array();
  for (const auto& [s, v] : report.variance_shares.shares)
    shares.push_back({ { "S", subset_json(s) }, { "share", v } });
  json doc;
  doc["schema_version"] = schema_version;
  doc["r2"] = report.r2;
  doc["max_corr"] = report.max_corr;
  doc["cosine_table"] = table;
  doc["variance_shares"] = shares;
  doc["variance_shares_degenerate"] = report.variance_shares.degenerate;
  doc["fit_seconds"] = report.fit_seconds;
  doc["metadata"] = { { "share_denominator", "variance of the reconstructed model" } };
  return doc;
}

json attribution_to_json(const Attribution& a, std::size_t row)
{
  json comps = json::array();
  for (const auto& [s, v] : a.components)
    comps.push_back({ { "S", subset_json(s) }, { "value", v } });
  json doc = { { "row", row },
               { "phi", to_std(a.phi) },
               { "baseline", a.baseline },
               { "prediction", a.prediction },
               { "components", comps } };
  doc["residual"] = a.residual ? json(*a.residual) : json(nullptr);
  return doc;
}

Matrix align_features(const DecompositionModel& model, const Dataset& data)
{
  const auto& want = model.feature_names;
  const auto& have = data.feature_names;
  std::vector<std::string> missing, extra;
  for (const auto& f : want)
    if (std::find(have.begin(), have.end(), f) == have.end())
      missing.push_back(f);
  for (const auto& f : have)
    if (std::find(want.begin(), want.end(), f) == want.end())
      extra.push_back(f);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "feature schema mismatch;";
    auto list = [&](const char* label, const std::vector<std::string>& v) {
      if (v.empty())
        return;
      msg += std::string(" ") + label + ":";
      for (const auto& f : v)
        msg += " " + f;
    };
    list("missing", missing);
    list("unexpected", extra);
    throw SchemaError(msg);
  }
  Matrix X(data.X.rows(), static_cast<Eigen::Index>(want.size()));
  for (std::size_t j = 0; j < want.size(); ++j) {
    const auto src = std::find(have.begin(), have.end(), want[j]) - have.begin();
    X.col(static_cast<Eigen::Index>(j)) = data.X.col(src);
  }
  return X;
}

json export_bundle(const DecompositionModel& model, const Dataset& data, const ExportOptions& options)
{
  const Matrix X = align_features(model, data);
  const int p = model.p();
  const Vector lo = X.colwise().minCoeff().transpose();
  const Vector hi = X.colwise().maxCoeff().transpose();
  const Vector mid = X.colwise().mean().transpose();

  json main_effects = json::array(), interactions = json::array();
  std::vector<double> point(mid.data(), mid.data() + p);
  for (const auto& c : model.components) {
    if (c.subset.size() == 1) {
      const int j = c.subset[0];
      const auto grid = linspace(lo(j), hi(j), options.grid_1d);
      std::vector<double> values;
      std::vector<double> x = point;
      for (double g : grid) {
        x[j] = g;
        values.push_back(model.component_eval(c.subset, x));
      }
      main_effects.push_back({ { "S", subset_json(c.subset) },
                               { "feature", model.feature_names[j] },
                               { "x_raw", grid },
                               { "values", values } });
    } else if (c.subset.size() == 2) {
      const int a = c.subset[0], b = c.subset[1];
      const auto ga = linspace(lo(a), hi(a), options.grid_2d);
      const auto gb = linspace(lo(b), hi(b), options.grid_2d);
      std::vector<double> values;
      std::vector<double> x = point;
      for (double va : ga)
        for (double vb : gb) {
          x[a] = va;
          x[b] = vb;
          values.push_back(model.component_eval(c.subset, x));
        }
      interactions.push_back({ { "S", subset_json(c.subset) },
                               { "features", { model.feature_names[a], model.feature_names[b] } },
                               { "x_raw", ga },
                               { "y_raw", gb },
                               { "values_row_major", values } });
    }
  }

  json attributions = json::array();
  const std::size_t rows = std::min<std::size_t>(options.max_rows, static_cast<std::size_t>(X.rows()));
  const bool has_y = data.y.size() == X.rows();
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector xi = X.row(static_cast<Eigen::Index>(i)).transpose();
    const std::span<const double> s(xi.data(), xi.size());
    const Attribution a = has_y ? model.shapley(s, data.y(static_cast<Eigen::Index>(i))) : model.shapley(s);
    json entry = attribution_to_json(a, i);
    entry["x_raw"] = to_std(xi);
    attributions.push_back(entry);
  }

  json bundle;
  bundle["schema_version"] = schema_version;
  bundle["model"] = model_to_json(model);
  if (has_y)
    bundle["metrics"] = metrics_to_json(compute_metrics(model, X, data.y));
  bundle["feature_names"] = model.feature_names;
  bundle["main_effects"] = main_effects;
  bundle["interactions"] = interactions;
  bundle["attributions"] = attributions;
  return bundle;
}

std::string format_cosine_table(const std::vector<CosineEntry>& table)
{
  std::ostringstream out;
  out << std::left << std::setw(16) << "S" << std::setw(16) << "T" << std::right
      << std::setw(14) << "cosine" << "\n";
  for (const auto& e : table) {
    out << std::left << std::setw(16) << subset_to_string(e.S) << std::setw(16)
        << subset_to_string(e.T) << std::right << std::setw(14) << std::scientific
        << std::setprecision(3) << e.cosine << (e.degenerate ? "  (degenerate)" : "") << "\n";
  }
  return out.str();
}

} // namespace hfd
