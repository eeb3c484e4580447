#pragma once

#include "hfd/types.hpp"

#include <span>
#include <vector>

namespace hfd {

//! Legendre polynomials P_0(x), ..., P_degree(x) by the three-term recurrence.
//!
//! No clamping: values outside [-1, 1] are evaluated as polynomials.
std::vector<double> legendre_all(int degree, double x);

//! Same as legendre_all, multiplied by sqrt((2m + 1) / 2) so that the
//! family is orthonormal on [-1, 1] under the Lebesgue measure.
std::vector<double> legendre_normalized_all(int degree, double x);

//! In-place variant; `out.size()` must be `degree + 1`.
void legendre_normalized_all(int degree, double x, std::span<double> out);

//! A subset of features together with one positive degree per feature,
//! i.e. the index (S, m_S) of a tensorized basis function.
struct TensorIndex
{
  Subset subset;
  std::vector<int> degrees;

  bool empty() const { return subset.empty(); }
  std::size_t order() const { return subset.size(); }

  friend bool operator==(const TensorIndex&, const TensorIndex&) = default;
};

//! Throws IndexError unless the subset is strictly increasing in [0, p) and
//! every degree is >= 1.
void validate_index(const TensorIndex& index, int p);

//! Tensorized numerator 2^{-(p-|S|)/2} prod_{j in S} Ptilde_{m_j}(x_j).
//! The empty index evaluates to 2^{-p/2}.
double psi_eval(const TensorIndex& index, std::span<const double> x);

} // namespace hfd
