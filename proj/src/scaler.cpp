#include "hfd/scaler.hpp"

#include "hfd/error.hpp"

#include <cmath>
#include <string>

namespace hfd {

namespace {

constexpr double min_std = 1e-12;

void check_finite(const Matrix& X)
{
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (!std::isfinite(X(i, j)))
        throw InputError("non-finite entry at row " + std::to_string(i) +
                         ", column " + std::to_string(j));
}

} // namespace

ScalerParams fit_scaler(const Matrix& X)
{
  if (X.rows() == 0 || X.cols() == 0)
    throw InputError("cannot fit a scaler on an empty matrix");
  check_finite(X);

  ScalerParams params;
  params.kind = Scaling::standardize_tanh;
  params.means = X.colwise().mean().transpose();
  params.stds.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var =
      (X.col(j).array() - params.means(j)).square().sum() / double(X.rows());
    const double sd = std::sqrt(var);
    params.stds(j) = sd < min_std ? 1.0 : sd;
  }
  return params;
}

ScalerParams identity_scaler(int p)
{
  ScalerParams params;
  params.kind = Scaling::identity;
  params.means = Vector::Zero(p);
  params.stds = Vector::Ones(p);
  return params;
}

Matrix transform(const ScalerParams& params, const Matrix& X)
{
  if (X.cols() != params.p())
    throw DimensionError("expected " + std::to_string(params.p()) +
                         " columns, got " + std::to_string(X.cols()));
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (params.kind == Scaling::identity) {
      out.col(j) = X.col(j);
      continue;
    }
    const double mean = params.means(j);
    const double sd = params.stds(j);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out(i, j) = std::tanh((X(i, j) - mean) / sd);
  }
  return out;
}

Vector transform_point(const ScalerParams& params, std::span<const double> x)
{
  if (static_cast<int>(x.size()) != params.p())
    throw DimensionError("expected a point of dimension " +
                         std::to_string(params.p()) + ", got " +
                         std::to_string(x.size()));
  Vector out(params.p());
  for (int j = 0; j < params.p(); ++j)
    out(j) = params.kind == Scaling::identity
               ? x[j]
               : std::tanh((x[j] - params.means(j)) / params.stds(j));
  return out;
}

Matrix inverse_transform(const ScalerParams& params, const Matrix& X_scaled)
{
  if (X_scaled.cols() != params.p())
    throw DimensionError("column count does not match the scaler");
  if (params.kind == Scaling::identity)
    return X_scaled;
  Matrix out(X_scaled.rows(), X_scaled.cols());
  for (Eigen::Index j = 0; j < X_scaled.cols(); ++j)
    for (Eigen::Index i = 0; i < X_scaled.rows(); ++i)
      out(i, j) = std::atanh(X_scaled(i, j)) * params.stds(j) + params.means(j);
  return out;
}

} // namespace hfd
