#include "rrnet/dataset.hpp"

#include <string>

#include "rrnet/error.hpp"

namespace rrnet {

void Dataset::validate() const {
  if (static_cast<std::size_t>(x.rows()) != size())
    throw InvalidArgument("dataset has " + std::to_string(x.rows()) + " feature rows but " + std::to_string(size()) +
                          " responses");
  if (!contaminated.empty() && contaminated.size() != size())
    throw InvalidArgument("contamination mask length does not match the dataset");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("dataset contains non-finite values");
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(indices.size()));
  out.contaminated.resize(indices.size(), false);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    out.x.row(static_cast<Eigen::Index>(k)) = x.row(i);
    out.y[static_cast<Eigen::Index>(k)] = y[i];
    if (!contaminated.empty()) out.contaminated[k] = contaminated[indices[k]];
  }
  return out;
}

}  // namespace rrnet
