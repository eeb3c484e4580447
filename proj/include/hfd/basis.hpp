#pragma once

#include "hfd/legendre.hpp"
#include "hfd/marginals.hpp"
#include "hfd/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hfd {

//! Contiguous run of truncation indices sharing one subset.
struct SubsetBlock
{
  Subset subset;
  std::size_t begin = 0;
  std::size_t end = 0;
};

//! All (S, m_S) with |S| <= K and degrees in {1..d}, ordered by |S|, then
//! lexicographic subset, then lexicographic degrees. Entry 0 is the empty
//! index (the intercept column).
struct TruncationSet
{
  int p = 0;
  int K = 0;
  int d = 0;
  std::vector<TensorIndex> indices;
  std::vector<SubsetBlock> blocks; // non-empty subsets only

  std::size_t size() const { return indices.size(); }

  //! Position of an index; throws IndexError when absent.
  std::size_t position(const TensorIndex& index) const;

  //! Distinct non-empty subsets, in column order.
  std::vector<Subset> subsets() const;
};

//! N(p, K, d) = sum_{k=0}^{K} C(p, k) d^k.
std::uint64_t truncation_count(int p, int K, int d);

TruncationSet enumerate_truncation(int p, int K, int d);

//! xi_S^{(m)}(x) = psi_S^{(m)}(x) / f_S(x_S); the empty index gives 1.
double xi_eval(const TensorIndex& index,
               std::span<const double> x_scaled,
               const MarginalDensity& marginals);

struct DesignMatrix
{
  Matrix values;
  TruncationSet columns;
};

//! Evaluates the weighted basis on rows of scaled data, optionally restricted
//! to a sorted list of truncation columns.
class DesignEvaluator
{
public:
  DesignEvaluator(const TruncationSet& truncation,
                  const MarginalDensity& marginals);
  DesignEvaluator(const TruncationSet& truncation,
                  const MarginalDensity& marginals,
                  std::vector<std::size_t> columns);

  std::size_t width() const { return columns_.size(); }
  const std::vector<std::size_t>& columns() const { return columns_; }

  //! Writes `width()` values for one scaled point.
  void evaluate(std::span<const double> x_scaled, std::span<double> out) const;

  //! Fills out(r - begin, :) for rows [begin, end) of X_scaled.
  void evaluate_rows(const Matrix& X_scaled,
                     Eigen::Index begin,
                     Eigen::Index end,
                     Matrix& out) const;

private:
  struct Group
  {
    Subset subset;
    double prefactor;
    // (output slot, truncation index) pairs
    std::vector<std::pair<std::size_t, std::size_t>> slots;
  };

  const TruncationSet* truncation_;
  const MarginalDensity* marginals_;
  std::vector<std::size_t> columns_;
  std::vector<Group> groups_;
  bool has_intercept_ = false;
  std::size_t intercept_slot_ = 0;
};

DesignMatrix build_design_matrix(const Matrix& X_scaled,
                                 const TruncationSet& truncation,
                                 const MarginalDensity& marginals);

} // namespace hfd
