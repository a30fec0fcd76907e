#pragma once

#include <cstddef>
#include <vector>

namespace pwspm {

/// Best fraction of agreeing labels over all one-to-one matchings of
/// predicted clusters to true classes (Hungarian assignment on the
/// contingency table). Label values are arbitrary integers.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Maximum-weight perfect matching on a square matrix; returns col[row].
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight);

}  // namespace pwspm
