#pragma once

// Quadrature checks of the weighted basis against exact densities, shared by
// the unit tests and the acceptance suite.

#include "hfd/basis.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace hfd::check {

struct OrthogonalityResult
{
  double worst_nested = 0.0;   // max |int xi_S xi_T f| over T strict subset of S, T non-empty
  double worst_centering = 0.0; // max |int xi_S f| over non-empty S
  double worst_cross = 0.0;    // max |int xi_S xi_T f| over S != T (any pair)
  std::size_t nested_pairs = 0;
};

// Integrates over [-1,1]^3 with a 64^3 Gauss-Legendre grid; `joint` is the
// full density and `marginals` its f_S. Indices use |S| <= 2, degrees <= max_degree.
inline OrthogonalityResult basis_orthogonality_3d(const MarginalDensity& marginals,
                                                  const std::function<double(const double*)>& joint,
                                                  int max_degree)
{
  const TruncationSet ts = enumerate_truncation(3, 2, max_degree);
  const std::size_t F = ts.size();
  const auto q = oracle::gauss_legendre(64);
  std::vector<double> cross(F * F, 0.0), mean(F, 0.0), vals(F);
  DesignEvaluator eval(ts, marginals);
  for (std::size_t a = 0; a < q.nodes.size(); ++a)
    for (std::size_t b = 0; b < q.nodes.size(); ++b)
      for (std::size_t c = 0; c < q.nodes.size(); ++c) {
        const double x[] = { q.nodes[a], q.nodes[b], q.nodes[c] };
        const double w = q.weights[a] * q.weights[b] * q.weights[c] * joint(x);
        eval.evaluate(x, vals);
        for (std::size_t f = 1; f < F; ++f) {
          const double wf = w * vals[f];
          mean[f] += wf;
          for (std::size_t g = 1; g < f; ++g)
            cross[f * F + g] += wf * vals[g];
        }
      }
  OrthogonalityResult r;
  for (std::size_t f = 1; f < F; ++f) {
    r.worst_centering = std::max(r.worst_centering, std::abs(mean[f]));
    for (std::size_t g = 1; g < f; ++g) {
      const auto& S = ts.indices[f].subset;
      const auto& T = ts.indices[g].subset;
      const double v = std::abs(cross[f * F + g]);
      if (S != T)
        r.worst_cross = std::max(r.worst_cross, v);
      if (is_strict_subset(T, S)) {
        r.worst_nested = std::max(r.worst_nested, v);
        ++r.nested_pairs;
      }
    }
  }
  return r;
}

// Brute-force size of the truncation set: all alpha in {0..d}^p with at
// most K non-zero entries.
inline std::size_t brute_force_truncation_count(int p, int K, int d)
{
  std::vector<int> alpha(p, 0);
  std::size_t count = 0;
  while (true) {
    const int support = static_cast<int>(std::count_if(alpha.begin(), alpha.end(), [](int v) { return v > 0; }));
    if (support <= K)
      ++count;
    int i = 0;
    while (i < p && alpha[i] == d)
      alpha[i++] = 0;
    if (i == p)
      break;
    ++alpha[i];
  }
  return count;
}

} // namespace hfd::check
