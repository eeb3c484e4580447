#pragma once

#include "hfd/basis.hpp"
#include "hfd/density.hpp"
#include "hfd/scaler.hpp"
#include "hfd/solver.hpp"
#include "hfd/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hfd {

struct FitConfig
{
  int K = 2;             // maximum interaction order
  int d = 10;            // maximum numerator degree
  int d_density = 4;     // density expansion degree
  double epsilon = 0.01; // density clip floor
  std::uint64_t seed = 0; // the fit itself is deterministic
  std::size_t max_lars_steps = 500;
  Scaling scaling = Scaling::standardize_tanh;

  void validate(int p) const;
};

//! Fitted terms of one non-empty subset S: nu_S = sum_k a_k xi_S^{(m_k)} - offset.
struct Component
{
  Subset subset;
  std::vector<std::vector<int>> degrees;
  std::vector<double> coefficients;
  double offset = 0.0;
};

//! Component values of several subsets on a batch of points.
struct ComponentValues
{
  std::vector<Subset> subsets;
  Matrix values; // rows = points, one column per subset
};

struct Attribution
{
  Vector phi;
  double baseline = 0.0;
  double prediction = 0.0;
  std::optional<double> residual;
  std::vector<std::pair<Subset, double>> components;
};

struct VarianceShares
{
  std::map<Subset, double> shares;
  double output_variance = 0.0;
  bool degenerate = false; // output variance was zero
};

//! Timing and bookkeeping of a fit; not part of the serialized model.
struct FitInfo
{
  double fit_seconds = 0.0;
  std::map<std::string, double> stage_seconds;
  std::vector<std::string> warnings;
  std::size_t n = 0;
};

class DecompositionModel
{
public:
  std::vector<std::string> feature_names;
  ScalerParams scaler;
  std::optional<DensityModel> density; // absent when fitted on external marginals
  std::shared_ptr<const MarginalDensity> marginals;
  int K = 0;
  int d = 0;
  std::vector<Component> components; // ordered like the truncation set
  double nu_empty = 0.0;
  SolveReport solve;
  FitInfo info;

  int p() const { return scaler.p(); }

  std::vector<Subset> selected_subsets() const;
  const Component* find(const Subset& subset) const;

  //! nu_S at a raw point; the empty subset gives nu_empty and unselected
  //! subsets give 0.
  double component_eval(const Subset& subset, std::span<const double> x_raw) const;

  //! Same on an already scaled point.
  double component_eval_scaled(const Subset& subset,
                               std::span<const double> x_scaled) const;

  double predict(std::span<const double> x_raw) const;
  Vector predict(const Matrix& X_raw) const;

  //! All selected components on each row of X_raw (raw coordinates).
  ComponentValues component_values(const Matrix& X_raw) const;
  ComponentValues component_values_scaled(const Matrix& X_scaled) const;

  //! ANOVA Shapley values phi_i = sum_{S containing i} nu_S / |S|.
  Attribution shapley(std::span<const double> x_raw,
                      std::optional<double> y = std::nullopt) const;

  VarianceShares variance_shares(const Matrix& X_raw) const;

private:
  double raw_component(const Component& c, std::span<const double> x_scaled) const;
};

//! Scale, estimate densities, assemble the design, select by LARS + BIC,
//! refit by SVD, recenter. When `marginals` is given it replaces the
//! estimated densities (the model then carries no DensityModel).
DecompositionModel fit(const Matrix& X_raw,
                       const Vector& y,
                       const FitConfig& config,
                       std::shared_ptr<const MarginalDensity> marginals = nullptr,
                       std::vector<std::string> feature_names = {});

//! Shifts every component to empirical mean zero on X_raw, moving the
//! offsets into nu_empty. Predictions are unchanged.
DecompositionModel recenter(const DecompositionModel& model, const Matrix& X_raw);

// Free-function forms of the evaluation surface.
double component_eval(const DecompositionModel& model,
                      const Subset& subset,
                      std::span<const double> x_raw);
double predict(const DecompositionModel& model, std::span<const double> x_raw);
Attribution shapley(const DecompositionModel& model, std::span<const double> x_raw);
VarianceShares variance_shares(const DecompositionModel& model, const Matrix& X_raw);

} // namespace hfd
