#pragma once

#include "hfd/types.hpp"

#include <span>

namespace hfd {

//! How raw features are mapped onto [-1, 1].
enum class Scaling
{
  //! tanh((x - mean) / std), the default explainer coordinates.
  standardize_tanh,
  //! Features are used as given; they must already live in [-1, 1].
  identity
};

struct ScalerParams
{
  Scaling kind = Scaling::standardize_tanh;
  Vector means;
  Vector stds;

  int p() const { return static_cast<int>(means.size()); }
};

//! Column means and population standard deviations. Columns whose std falls
//! below 1e-12 get std = 1 and map to the constant 0.
ScalerParams fit_scaler(const Matrix& X);

//! Identity scaler for data that is already in [-1, 1]^p.
ScalerParams identity_scaler(int p);

Matrix transform(const ScalerParams& params, const Matrix& X);

//! Single-point variant of `transform`.
Vector transform_point(const ScalerParams& params, std::span<const double> x);

//! Inverse of `transform` for the standardize_tanh scaler.
Matrix inverse_transform(const ScalerParams& params, const Matrix& X_scaled);

} // namespace hfd
