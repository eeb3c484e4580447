#include "hfd/diagnostics.hpp"

#include "hfd/error.hpp"

#include <cmath>

namespace hfd {

double reconstruction_r2(const Vector& y, const Vector& prediction)
{
  if (y.size() != prediction.size())
    throw DimensionError("response and prediction lengths differ");
  if (y.size() < 2)
    throw InputError("R^2 needs at least two points");
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - prediction).squaredNorm();
  if (!(ss_tot > 0.0)) {
    if (ss_res == 0.0)
      return 1.0;
    throw InputError("R^2 undefined: constant response with non-zero residuals");
  }
  return 1.0 - ss_res / ss_tot;
}

double reconstruction_r2(const DecompositionModel& model, const Matrix& X_raw, const Vector& y)
{
  return reconstruction_r2(y, model.predict(X_raw));
}

std::vector<CosineEntry> cosine_table(const ComponentValues& cv)
{
  const Eigen::Index n = cv.values.rows();
  if (n == 0)
    throw InputError("cosine table needs a non-empty evaluation set");
  const double dn = static_cast<double>(n);
  const auto k = static_cast<Eigen::Index>(cv.subsets.size());
  Vector second(k), first(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    first(a) = cv.values.col(a).sum() / dn;
    second(a) = cv.values.col(a).squaredNorm() / dn;
  }

  std::vector<CosineEntry> table;
  for (Eigen::Index s = 0; s < k; ++s) {
    CosineEntry centering{ cv.subsets[s], {}, 0.0, false };
    if (second(s) > 0.0)
      centering.cosine = first(s) / std::sqrt(second(s));
    else
      centering.degenerate = true;
    table.push_back(centering);
    for (Eigen::Index t = 0; t < k; ++t) {
      if (!is_strict_subset(cv.subsets[t], cv.subsets[s]) || cv.subsets[t].empty())
        continue;
      CosineEntry e{ cv.subsets[s], cv.subsets[t], 0.0, false };
      const double denom = std::sqrt(second(s) * second(t));
      if (denom > 0.0)
        e.cosine = cv.values.col(s).dot(cv.values.col(t)) / dn / denom;
      else
        e.degenerate = true;
      table.push_back(e);
    }
  }
  return table;
}

std::vector<CosineEntry> cosine_table(const DecompositionModel& model, const Matrix& X_raw)
{
  return cosine_table(model.component_values(X_raw));
}

double max_corr(const std::vector<CosineEntry>& table,
                const VarianceShares& shares,
                double share_threshold)
{
  double best = 0.0;
  for (const auto& e : table) {
    if (e.T.empty() || e.degenerate)
      continue;
    auto it = shares.shares.find(e.S);
    if (it == shares.shares.end() || it->second < share_threshold)
      continue;
    best = std::max(best, std::abs(e.cosine));
  }
  return best;
}

double max_corr(const DecompositionModel& model, const Matrix& X_raw, double share_threshold)
{
  return max_corr(cosine_table(model, X_raw), model.variance_shares(X_raw), share_threshold);
}

MetricsReport compute_metrics(const DecompositionModel& model,
                              const Matrix& X_raw,
                              const Vector& y,
                              double share_threshold)
{
  MetricsReport report;
  const ComponentValues cv = model.component_values(X_raw);
  Vector prediction = Vector::Constant(X_raw.rows(), model.nu_empty);
  for (Eigen::Index k = 0; k < cv.values.cols(); ++k)
    prediction += cv.values.col(k);
  report.r2 = reconstruction_r2(y, prediction);
  report.variance_shares = model.variance_shares(X_raw);
  if (!cv.subsets.empty())
    report.cosine_table = cosine_table(cv);
  report.max_corr = max_corr(report.cosine_table, report.variance_shares, share_threshold);
  report.fit_seconds = model.info.fit_seconds;
  return report;
}

} // namespace hfd
