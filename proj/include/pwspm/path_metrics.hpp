#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pwspm/dataset.hpp"

namespace pwspm {

/// Exponent of a power-weighted path metric: a finite p >= 1 or infinity,
/// the latter selecting the longest-leg path distance.
class PowerParam {
 public:
  static PowerParam finite(double p);
  static PowerParam infinity() { return PowerParam(); }
  /// Accepts a decimal number >= 1 or "inf".
  static PowerParam parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  /// Finite exponent; throws for infinity.
  double value() const;
  std::string to_string() const;

  friend bool operator==(const PowerParam&, const PowerParam&) = default;

 private:
  PowerParam() = default;
  double p_ = 0.0;
  bool infinite_ = true;
};

std::vector<PowerParam> parse_power_list(const std::string& csv);

/// Point indices i_0, ..., i_{m+1} visited in order.
struct Path {
  std::vector<std::size_t> indices;
};

/// (sum_j |x_{j+1} - x_j|^p)^{1/p}, or the longest leg for p = inf.
double path_length(const Dataset& data, const Path& path, PowerParam p);

/// Same functional over explicit leg lengths.
double path_length(const std::vector<double>& legs, PowerParam p);

struct DistanceMatrix {
  Eigen::MatrixXd values;
  PowerParam p;
};

inline constexpr std::size_t kDefaultOracleCap = 2000;

/// All-pairs path distances through the whole point set by Floyd-Warshall on
/// the complete graph (power domain for finite p, min-max for infinity).
/// O(n^3); refuses datasets larger than `cap`.
DistanceMatrix pairwise_exact(const Dataset& data, PowerParam p,
                              std::size_t cap = kDefaultOracleCap);

/// Plain Euclidean distance matrix.
Eigen::MatrixXd pairwise_euclidean(const Dataset& data);

struct SeparationStats {
  double eps1;                  // max intra-cluster path distance
  std::optional<double> eps2;   // min inter-cluster path distance; none for one cluster
};

SeparationStats intra_inter_stats(const Dataset& data, PowerParam p,
                                  std::size_t cap = kDefaultOracleCap);
SeparationStats intra_inter_stats(const DistanceMatrix& dist, const std::vector<int>& labels);

void write_csv(const DistanceMatrix& dist, const std::filesystem::path& path);

}  // namespace pwspm
