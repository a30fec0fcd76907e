#include "pwspm/accuracy.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace pwspm {

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t n = weight.size();
  for (const auto& row : weight) {
    if (row.size() != n) throw std::invalid_argument("assignment matrix must be square");
  }
  if (n == 0) return {};
  // Shortest augmenting path (Jonker-Volgenant style potentials) on cost = -weight,
  // 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col(n);
  for (std::size_t j = 1; j <= n; ++j) col[match[j] - 1] = j - 1;
  return col;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("accuracy: predicted has " + std::to_string(predicted.size()) +
                                " labels, truth has " + std::to_string(truth.size()));
  }
  if (truth.empty()) throw std::invalid_argument("accuracy of an empty labelling");
  std::map<int, std::size_t> pred_ids, true_ids;
  for (int v : predicted) pred_ids.try_emplace(v, 0);
  for (int v : truth) true_ids.try_emplace(v, 0);
  std::size_t next = 0;
  for (auto& [value, id] : pred_ids) id = next++;
  next = 0;
  for (auto& [value, id] : true_ids) id = next++;

  const std::size_t m = std::max(pred_ids.size(), true_ids.size());
  std::vector<std::vector<double>> table(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    table[pred_ids[predicted[i]]][true_ids[truth[i]]] += 1.0;
  }
  const auto col = max_weight_assignment(table);
  double hits = 0.0;
  for (std::size_t r = 0; r < m; ++r) hits += table[r][col[r]];
  return hits / static_cast<double>(truth.size());
}

}  // namespace pwspm
