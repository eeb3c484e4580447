#include "hfd/basis.hpp"

#include "hfd/error.hpp"
#include "hfd/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace hfd {

namespace {

std::uint64_t binomial(int n, int k)
{
  if (k < 0 || k > n)
    return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

// Lexicographic k-combinations of {0..p-1}.
void for_each_combination(int p, int k, auto&& visit)
{
  Subset c(k);
  for (int i = 0; i < k; ++i)
    c[i] = i;
  while (true) {
    visit(c);
    int i = k - 1;
    while (i >= 0 && c[i] == p - k + i)
      --i;
    if (i < 0)
      return;
    ++c[i];
    for (int j = i + 1; j < k; ++j)
      c[j] = c[j - 1] + 1;
  }
}

} // namespace

std::uint64_t truncation_count(int p, int K, int d)
{
  std::uint64_t total = 0, power = 1;
  for (int k = 0; k <= K; ++k) {
    total += binomial(p, k) * power;
    power *= static_cast<std::uint64_t>(d);
  }
  return total;
}

TruncationSet enumerate_truncation(int p, int K, int d)
{
  if (p < 1)
    throw ConfigError("need at least one feature");
  if (K < 1 || K > p)
    throw ConfigError("interaction order K must satisfy 1 <= K <= p (K = " +
                      std::to_string(K) + ", p = " + std::to_string(p) + ")");
  if (d < 1)
    throw ConfigError("maximum degree d must be >= 1");

  TruncationSet set;
  set.p = p;
  set.K = K;
  set.d = d;
  set.indices.reserve(truncation_count(p, K, d));
  set.indices.push_back(TensorIndex{});
  for (int k = 1; k <= K; ++k) {
    for_each_combination(p, k, [&](const Subset& subset) {
      SubsetBlock block{ subset, set.indices.size(), 0 };
      std::vector<int> degrees(k, 1);
      while (true) {
        set.indices.push_back(TensorIndex{ subset, degrees });
        int i = k - 1;
        while (i >= 0 && degrees[i] == d)
          --i;
        if (i < 0)
          break;
        ++degrees[i];
        for (int j = i + 1; j < k; ++j)
          degrees[j] = 1;
      }
      block.end = set.indices.size();
      set.blocks.push_back(std::move(block));
    });
  }
  return set;
}

std::size_t TruncationSet::position(const TensorIndex& index) const
{
  if (index.empty())
    return 0;
  for (const auto& block : blocks) {
    if (block.subset != index.subset)
      continue;
    for (std::size_t k = block.begin; k < block.end; ++k)
      if (indices[k].degrees == index.degrees)
        return k;
  }
  throw IndexError("basis index " + subset_to_string(index.subset) +
                   " is not part of the truncation set");
}

std::vector<Subset> TruncationSet::subsets() const
{
  std::vector<Subset> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks)
    out.push_back(b.subset);
  return out;
}

double xi_eval(const TensorIndex& index,
               std::span<const double> x_scaled,
               const MarginalDensity& marginals)
{
  if (index.empty())
    return 1.0;
  const double numerator = psi_eval(index, x_scaled);
  std::vector<double> xs;
  xs.reserve(index.order());
  for (int j : index.subset)
    xs.push_back(x_scaled[j]);
  return numerator / marginals.density(index.subset, xs);
}

DesignEvaluator::DesignEvaluator(const TruncationSet& truncation,
                                 const MarginalDensity& marginals)
  : DesignEvaluator(truncation, marginals, [&] {
    std::vector<std::size_t> all(truncation.size());
    for (std::size_t k = 0; k < all.size(); ++k)
      all[k] = k;
    return all;
  }())
{}

DesignEvaluator::DesignEvaluator(const TruncationSet& truncation,
                                 const MarginalDensity& marginals,
                                 std::vector<std::size_t> columns)
  : truncation_(&truncation)
  , marginals_(&marginals)
  , columns_(std::move(columns))
{
  for (std::size_t slot = 0; slot < columns_.size(); ++slot) {
    const std::size_t col = columns_[slot];
    if (col >= truncation.size())
      throw IndexError("design column " + std::to_string(col) + " out of range");
    const auto& index = truncation.indices[col];
    if (index.empty()) {
      has_intercept_ = true;
      intercept_slot_ = slot;
      continue;
    }
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const Group& g) { return g.subset == index.subset; });
    if (it == groups_.end()) {
      const int free_dims = truncation.p - static_cast<int>(index.order());
      groups_.push_back(Group{ index.subset, std::pow(2.0, -0.5 * free_dims), {} });
      it = std::prev(groups_.end());
    }
    it->slots.emplace_back(slot, col);
  }
}

void DesignEvaluator::evaluate(std::span<const double> x,
                               std::span<double> out) const
{
  const int p = truncation_->p;
  const int d = truncation_->d;
  if (static_cast<int>(x.size()) != p)
    throw DimensionError("design row has wrong dimension");
  if (out.size() != columns_.size())
    throw DimensionError("design output span has wrong width");

  // Ladders are computed lazily per feature actually used.
  std::vector<double> ladders(static_cast<std::size_t>(p) * (d + 1));
  std::vector<char> ready(p, 0);
  auto ladder = [&](int j) -> const double* {
    double* l = ladders.data() + static_cast<std::size_t>(j) * (d + 1);
    if (!ready[j]) {
      legendre_normalized_all(d, x[j], std::span<double>(l, d + 1));
      ready[j] = 1;
    }
    return l;
  };

  if (has_intercept_)
    out[intercept_slot_] = 1.0;
  std::vector<double> xs;
  for (const auto& group : groups_) {
    xs.clear();
    for (int j : group.subset)
      xs.push_back(x[j]);
    const double scale = group.prefactor / marginals_->density(group.subset, xs);
    for (const auto& [slot, col] : group.slots) {
      const auto& index = truncation_->indices[col];
      double v = scale;
      for (std::size_t k = 0; k < index.order(); ++k)
        v *= ladder(index.subset[k])[index.degrees[k]];
      out[slot] = v;
    }
  }
}

void DesignEvaluator::evaluate_rows(const Matrix& X_scaled,
                                    Eigen::Index begin,
                                    Eigen::Index end,
                                    Matrix& out) const
{
  const Eigen::Index rows = end - begin;
  if (out.rows() != rows || out.cols() != static_cast<Eigen::Index>(width()))
    out.resize(rows, static_cast<Eigen::Index>(width()));
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t b, std::size_t e) {
    std::vector<double> x(X_scaled.cols()), row(width());
    for (std::size_t r = b; r < e; ++r) {
      for (Eigen::Index j = 0; j < X_scaled.cols(); ++j)
        x[j] = X_scaled(begin + r, j);
      evaluate(x, row);
      for (std::size_t c = 0; c < row.size(); ++c)
        out(r, c) = row[c];
    }
  });
}

DesignMatrix build_design_matrix(const Matrix& X_scaled,
                                 const TruncationSet& truncation,
                                 const MarginalDensity& marginals)
{
  if (X_scaled.cols() != truncation.p)
    throw DimensionError("data dimension does not match the truncation set");
  DesignEvaluator evaluator(truncation, marginals);
  DesignMatrix design{ Matrix(), truncation };
  evaluator.evaluate_rows(X_scaled, 0, X_scaled.rows(), design.values);
  return design;
}

} // namespace hfd
