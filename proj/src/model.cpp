#include "hfd/model.hpp"

#include "hfd/error.hpp"
#include "hfd/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hfd {

namespace {

constexpr Eigen::Index design_block_rows = 1024;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double population_variance(const Eigen::Ref<const Vector>& v)
{
  if (v.size() == 0)
    return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

} // namespace

void FitConfig::validate(int p) const
{
  if (K < 1 || K > p)
    throw ConfigError("K must satisfy 1 <= K <= p (K = " + std::to_string(K) +
                      ", p = " + std::to_string(p) + ")");
  if (d < 1)
    throw ConfigError("d must be >= 1");
  if (d_density < 0)
    throw ConfigError("d_density must be >= 0");
  if (!(epsilon > 0.0))
    throw ConfigError("density clip epsilon must be > 0");
  if (max_lars_steps < 1)
    throw ConfigError("max_lars_steps must be >= 1");
}

std::vector<Subset> DecompositionModel::selected_subsets() const
{
  std::vector<Subset> out;
  out.reserve(components.size());
  for (const auto& c : components)
    out.push_back(c.subset);
  return out;
}

const Component* DecompositionModel::find(const Subset& subset) const
{
  for (const auto& c : components)
    if (c.subset == subset)
      return &c;
  return nullptr;
}

double DecompositionModel::raw_component(const Component& c,
                                         std::span<const double> x) const
{
  const int order = static_cast<int>(c.subset.size());
  std::vector<double> xs(order);
  std::vector<double> ladders(static_cast<std::size_t>(order) * (d + 1));
  for (int k = 0; k < order; ++k) {
    xs[k] = x[c.subset[k]];
    legendre_normalized_all(d, xs[k], std::span<double>(ladders.data() + k * (d + 1), d + 1));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < c.coefficients.size(); ++t) {
    double term = c.coefficients[t];
    for (int k = 0; k < order; ++k)
      term *= ladders[k * (d + 1) + c.degrees[t][k]];
    sum += term;
  }
  const double prefactor = std::pow(2.0, -0.5 * (p() - order));
  return sum * prefactor / marginals->density(c.subset, xs);
}

double DecompositionModel::component_eval_scaled(const Subset& subset,
                                                 std::span<const double> x_scaled) const
{
  if (static_cast<int>(x_scaled.size()) != p())
    throw DimensionError("point has dimension " + std::to_string(x_scaled.size()) +
                         ", model expects " + std::to_string(p()));
  if (subset.empty())
    return nu_empty;
  const Component* c = find(subset);
  if (c == nullptr)
    return 0.0;
  return raw_component(*c, x_scaled) - c->offset;
}

double DecompositionModel::component_eval(const Subset& subset,
                                          std::span<const double> x_raw) const
{
  const Vector xs = transform_point(scaler, x_raw);
  return component_eval_scaled(subset, std::span<const double>(xs.data(), xs.size()));
}

double DecompositionModel::predict(std::span<const double> x_raw) const
{
  const Vector xs = transform_point(scaler, x_raw);
  const std::span<const double> s(xs.data(), xs.size());
  double value = nu_empty;
  for (const auto& c : components)
    value += raw_component(c, s) - c.offset;
  return value;
}

ComponentValues DecompositionModel::component_values_scaled(const Matrix& X_scaled) const
{
  if (X_scaled.cols() != p())
    throw DimensionError("data has " + std::to_string(X_scaled.cols()) +
                         " columns, model expects " + std::to_string(p()));
  ComponentValues out;
  out.subsets = selected_subsets();
  out.values.resize(X_scaled.rows(), static_cast<Eigen::Index>(components.size()));
  parallel_for(static_cast<std::size_t>(X_scaled.rows()), [&](std::size_t b, std::size_t e) {
    std::vector<double> x(p());
    for (std::size_t i = b; i < e; ++i) {
      for (int j = 0; j < p(); ++j)
        x[j] = X_scaled(i, j);
      for (std::size_t k = 0; k < components.size(); ++k)
        out.values(i, k) = raw_component(components[k], x) - components[k].offset;
    }
  });
  return out;
}

ComponentValues DecompositionModel::component_values(const Matrix& X_raw) const
{
  if (X_raw.cols() != p())
    throw DimensionError("data has " + std::to_string(X_raw.cols()) +
                         " columns, model expects " + std::to_string(p()));
  return component_values_scaled(transform(scaler, X_raw));
}

Vector DecompositionModel::predict(const Matrix& X_raw) const
{
  const ComponentValues cv = component_values(X_raw);
  Vector out(X_raw.rows());
  for (Eigen::Index i = 0; i < X_raw.rows(); ++i) {
    double value = nu_empty;
    for (Eigen::Index k = 0; k < cv.values.cols(); ++k)
      value += cv.values(i, k);
    out(i) = value;
  }
  return out;
}

Attribution DecompositionModel::shapley(std::span<const double> x_raw,
                                        std::optional<double> y) const
{
  const Vector xs = transform_point(scaler, x_raw);
  const std::span<const double> s(xs.data(), xs.size());
  Attribution out;
  out.phi = Vector::Zero(p());
  out.baseline = nu_empty;
  out.prediction = nu_empty;
  for (const auto& c : components) {
    const double v = raw_component(c, s) - c.offset;
    out.components.emplace_back(c.subset, v);
    out.prediction += v;
    const double share = v / static_cast<double>(c.subset.size());
    for (int j : c.subset)
      out.phi(j) += share;
  }
  if (y)
    out.residual = *y - out.prediction;
  return out;
}

VarianceShares DecompositionModel::variance_shares(const Matrix& X_raw) const
{
  if (X_raw.rows() == 0)
    throw InputError("variance shares need a non-empty evaluation set");
  const ComponentValues cv = component_values(X_raw);
  Vector total = Vector::Constant(X_raw.rows(), nu_empty);
  for (Eigen::Index k = 0; k < cv.values.cols(); ++k)
    total += cv.values.col(k);
  VarianceShares out;
  out.output_variance = population_variance(total);
  out.degenerate = !(out.output_variance > 0.0);
  for (std::size_t k = 0; k < cv.subsets.size(); ++k)
    out.shares[cv.subsets[k]] =
      out.degenerate ? 0.0
                     : population_variance(cv.values.col(static_cast<Eigen::Index>(k))) /
                         out.output_variance;
  return out;
}

DecompositionModel recenter(const DecompositionModel& model, const Matrix& X_raw)
{
  DecompositionModel out = model;
  if (X_raw.rows() == 0)
    return out;
  const ComponentValues cv = model.component_values(X_raw);
  for (std::size_t k = 0; k < out.components.size(); ++k) {
    const double mean = cv.values.col(static_cast<Eigen::Index>(k)).mean();
    out.components[k].offset += mean;
    out.nu_empty += mean;
  }
  return out;
}

DecompositionModel fit(const Matrix& X_raw,
                       const Vector& y,
                       const FitConfig& config,
                       std::shared_ptr<const MarginalDensity> marginals,
                       std::vector<std::string> feature_names)
{
  const auto t_start = Clock::now();
  const Eigen::Index n = X_raw.rows();
  const int p = static_cast<int>(X_raw.cols());
  if (n < 2 || p < 1)
    throw InputError("fit needs at least two rows and one feature");
  if (y.size() != n)
    throw DimensionError("response length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(n) + " rows");
  if (!y.allFinite())
    throw InputError("response contains non-finite values");
  config.validate(p);

  DecompositionModel model;
  model.K = config.K;
  model.d = config.d;
  model.info.n = static_cast<std::size_t>(n);
  if (feature_names.empty())
    for (int j = 0; j < p; ++j)
      feature_names.push_back("x" + std::to_string(j + 1));
  if (static_cast<int>(feature_names.size()) != p)
    throw DimensionError("feature name count does not match the data");
  model.feature_names = std::move(feature_names);

  auto t = Clock::now();
  if (config.scaling == Scaling::identity) {
    if (!X_raw.allFinite())
      throw InputError("features contain non-finite values");
    if (X_raw.cwiseAbs().maxCoeff() > 1.0)
      throw InputError("identity scaling requires features in [-1, 1]");
    model.scaler = identity_scaler(p);
  } else {
    model.scaler = fit_scaler(X_raw);
  }
  const Matrix Xs = transform(model.scaler, X_raw);
  model.info.stage_seconds["scaling"] = seconds_since(t);

  const TruncationSet truncation = enumerate_truncation(p, config.K, config.d);
  if (static_cast<std::size_t>(n) <= truncation.size())
    model.info.warnings.push_back("n = " + std::to_string(n) +
                                  " does not exceed the number of basis functions " +
                                  std::to_string(truncation.size()));

  t = Clock::now();
  if (marginals) {
    model.marginals = std::move(marginals);
  } else {
    model.density = fit_density(Xs, truncation.subsets(), config.d_density, config.epsilon);
    model.marginals = std::make_shared<DensityModel>(*model.density);
  }
  model.info.stage_seconds["density"] = seconds_since(t);

  t = Clock::now();
  GramAccumulator gram(y, truncation.size(), true);
  {
    DesignEvaluator evaluator(truncation, *model.marginals);
    Matrix block;
    for (Eigen::Index begin = 0; begin < n; begin += design_block_rows) {
      const Eigen::Index end = std::min(n, begin + design_block_rows);
      evaluator.evaluate_rows(Xs, begin, end, block);
      gram.add_rows(begin, block);
    }
  }
  const GramSystem system = gram.finish();
  model.info.stage_seconds["design"] = seconds_since(t);

  t = Clock::now();
  LarsOptions lars_options;
  lars_options.max_steps = config.max_lars_steps;
  const LarsPath path = lars_path(system, lars_options);
  const BicSelection selection = bic_select(path, static_cast<std::size_t>(n));
  if (!path.collinear_columns.empty())
    model.info.warnings.push_back(std::to_string(path.collinear_columns.size()) +
                                  " collinear design columns were left out of the path");
  model.info.stage_seconds["selection"] = seconds_since(t);

  t = Clock::now();
  std::vector<std::size_t> reduced{ 0 };
  reduced.insert(reduced.end(), selection.support.begin(), selection.support.end());
  Matrix B_reduced;
  DesignEvaluator reduced_eval(truncation, *model.marginals, reduced);
  reduced_eval.evaluate_rows(Xs, 0, n, B_reduced);
  LeastSquaresSolution ls;
  if (reduced.size() == 1) {
    // Intercept-only model: the least-squares answer is the sample mean.
    ls.coefficients = Vector::Constant(1, y.mean());
    ls.rank = 1;
  } else {
    ls = solve_reduced(B_reduced, y);
  }
  model.info.stage_seconds["solve"] = seconds_since(t);

  model.solve.selected_support = reduced;
  model.solve.coefficients = ls.coefficients;
  model.solve.bic_values = selection.bic_values;
  model.solve.selected_step = selection.step;
  model.solve.rank = ls.rank;
  model.solve.path_steps = path.steps.size();
  model.solve.skipped_columns = path.skipped_columns;

  // Group the support by subset; reduced columns are in truncation order.
  double intercept = ls.coefficients(0);
  for (std::size_t k = 1; k < reduced.size(); ++k) {
    const TensorIndex& index = truncation.indices[reduced[k]];
    if (model.components.empty() || model.components.back().subset != index.subset)
      model.components.push_back(Component{ index.subset, {}, {}, 0.0 });
    model.components.back().degrees.push_back(index.degrees);
    model.components.back().coefficients.push_back(ls.coefficients(static_cast<Eigen::Index>(k)));
  }

  // Recentering on the fit data from the reduced design directly.
  model.nu_empty = intercept;
  std::size_t col = 1;
  for (auto& c : model.components) {
    Vector values = Vector::Zero(n);
    for (double a : c.coefficients)
      values += a * B_reduced.col(static_cast<Eigen::Index>(col++));
    c.offset = values.mean();
    model.nu_empty += c.offset;
  }

  model.info.fit_seconds = seconds_since(t_start);
  return model;
}

double component_eval(const DecompositionModel& model,
                      const Subset& subset,
                      std::span<const double> x_raw)
{
  return model.component_eval(subset, x_raw);
}

double predict(const DecompositionModel& model, std::span<const double> x_raw)
{
  return model.predict(x_raw);
}

Attribution shapley(const DecompositionModel& model, std::span<const double> x_raw)
{
  return model.shapley(x_raw);
}

VarianceShares variance_shares(const DecompositionModel& model, const Matrix& X_raw)
{
  return model.variance_shares(X_raw);
}

} // namespace hfd
