#pragma once

#include "hfd/types.hpp"

#include <cstddef>
#include <vector>

namespace hfd {

//! One knot of the lasso-modified LARS path.
struct LarsStep
{
  std::vector<std::size_t> support; // design columns, ascending
  std::vector<double> coefficients; // aligned with support, design units
  double intercept = 0.0;
  double rss = 0.0;
  //! Max absolute correlation with the residual in standardized units; the
  //! step solves min 1/2 ||y - X b||^2 + penalty * ||b||_1 on the centered,
  //! unit-norm columns.
  double penalty = 0.0;
};

struct LarsPath
{
  std::vector<LarsStep> steps; // steps[0] is the empty model
  std::vector<std::size_t> skipped_columns; // constant after centering
  std::vector<std::size_t> collinear_columns; // rejected from the active set
  bool has_intercept = true;
  std::size_t n = 0;
};

struct LarsOptions
{
  //! Treat design column 0 as the intercept: excluded from the path, the
  //! remaining columns and y are centered.
  bool intercept_column = true;
  std::size_t max_steps = 500;
};

//! Centered, column-standardized normal equations of a design matrix.
struct GramSystem
{
  std::size_t n = 0;
  bool has_intercept = true;
  std::vector<std::size_t> columns; // design column of each Gram column
  Matrix gram;                      // unit diagonal
  Vector xty;
  double yty = 0.0;
  Vector scale; // Euclidean norms of the centered columns
  Vector means; // column means (zero without intercept)
  double y_mean = 0.0;
  std::vector<std::size_t> skipped_columns;
};

//! Streams row blocks of a design matrix into a GramSystem, so the full
//! matrix never has to be held in memory.
class GramAccumulator
{
public:
  GramAccumulator(const Vector& y, std::size_t design_columns, bool intercept_column);

  //! `block` holds all design columns for rows [row_begin, row_begin + rows).
  void add_rows(Eigen::Index row_begin, const Matrix& block);

  GramSystem finish() const;

private:
  const Vector* y_;
  bool intercept_;
  std::size_t design_columns_;
  Eigen::Index offset_; // first non-intercept column
  double y_mean_;
  Matrix cross_;
  Vector sums_;
  Vector xty_;
  std::size_t rows_ = 0;
};

GramSystem make_gram_system(const Matrix& B, const Vector& y, bool intercept_column);

LarsPath lars_path(const GramSystem& system, const LarsOptions& options = {});
LarsPath lars_path(const Matrix& B, const Vector& y, const LarsOptions& options = {});

struct BicSelection
{
  std::size_t step = 0;
  std::vector<std::size_t> support;
  std::vector<double> bic_values; // one per path step
};

//! argmin over steps of n ln(RSS/n) + k ln(n), k counting the intercept.
//! Ties go to the smaller support.
BicSelection bic_select(const LarsPath& path, std::size_t n);

struct LeastSquaresSolution
{
  Vector coefficients;
  int rank = 0;
};

//! Minimum-norm least squares by thin SVD; singular values below
//! eps * max(n, k) * sigma_max are discarded.
LeastSquaresSolution solve_reduced(const Matrix& B_reduced, const Vector& y);

//! Outcome of the selection + refit pipeline.
struct SolveReport
{
  std::vector<std::size_t> selected_support; // design columns, 0 = intercept
  Vector coefficients;                        // aligned with selected_support
  std::vector<double> bic_values;
  std::size_t selected_step = 0;
  int rank = 0;
  std::size_t path_steps = 0;
  std::vector<std::size_t> skipped_columns;
};

} // namespace hfd
