#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hfd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

//! Strictly increasing list of 0-based feature indices.
using Subset = std::vector<int>;

std::string subset_to_string(const Subset& subset);

//! Sorts and checks for duplicates / range; throws IndexError.
Subset canonical_subset(Subset subset, int p);

//! True when `inner` is a strict subset of `outer` (both canonical).
bool is_strict_subset(const Subset& inner, const Subset& outer);

} // namespace hfd
