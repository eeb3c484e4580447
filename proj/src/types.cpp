#include "hfd/types.hpp"

#include "hfd/error.hpp"

#include <algorithm>

namespace hfd {

std::string subset_to_string(const Subset& subset)
{
  std::string out = "{";
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (k > 0)
      out += ",";
    out += std::to_string(subset[k]);
  }
  return out + "}";
}

Subset canonical_subset(Subset subset, int p)
{
  std::sort(subset.begin(), subset.end());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] < 0 || subset[k] >= p)
      throw IndexError("feature index " + std::to_string(subset[k]) +
                       " out of range for p = " + std::to_string(p));
    if (k > 0 && subset[k] == subset[k - 1])
      throw IndexError("duplicate feature index in subset " +
                       subset_to_string(subset));
  }
  return subset;
}

bool is_strict_subset(const Subset& inner, const Subset& outer)
{
  return inner.size() < outer.size() &&
         std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

} // namespace hfd
