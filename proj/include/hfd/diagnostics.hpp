#pragma once

#include "hfd/model.hpp"

#include <vector>

namespace hfd {

struct CosineEntry
{
  Subset S;
  Subset T; // strict subset of S; empty means the centering row
  double cosine = 0.0;
  bool degenerate = false; // a zero second moment was involved
};

struct MetricsReport
{
  double r2 = 0.0;
  std::vector<CosineEntry> cosine_table;
  double max_corr = 0.0;
  VarianceShares variance_shares;
  double fit_seconds = 0.0;
};

//! 1 - SS_res / SS_tot. A constant response gives 1 when the residuals are
//! all zero and throws InputError otherwise.
double reconstruction_r2(const Vector& y, const Vector& prediction);
double reconstruction_r2(const DecompositionModel& model, const Matrix& X_raw, const Vector& y);

//! Empirical cosines for every nested pair T (strict) of S among `values`,
//! plus the centering rows (S, {}).
std::vector<CosineEntry> cosine_table(const ComponentValues& values);
std::vector<CosineEntry> cosine_table(const DecompositionModel& model, const Matrix& X_raw);

//! Largest |cosine| over pairs with non-empty T whose outer component S has
//! variance share >= share_threshold. Zero when nothing passes the filter.
double max_corr(const std::vector<CosineEntry>& table,
                const VarianceShares& shares,
                double share_threshold = 0.01);
double max_corr(const DecompositionModel& model,
                const Matrix& X_raw,
                double share_threshold = 0.01);

MetricsReport compute_metrics(const DecompositionModel& model,
                              const Matrix& X_raw,
                              const Vector& y,
                              double share_threshold = 0.01);

} // namespace hfd
