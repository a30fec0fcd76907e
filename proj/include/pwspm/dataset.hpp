#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace pwspm {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A finite point cloud in R^D with optional ground-truth cluster labels.
///
/// Immutable after construction. Labels, when present, are dense ids in
/// [0, num_clusters()) and every id occurs at least once.
class Dataset {
 public:
  Dataset(PointMatrix points, std::optional<std::vector<int>> labels = std::nullopt,
          std::string name = "dataset");

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const PointMatrix& points() const { return points_; }
  std::span<const double> row(std::size_t i) const {
    return {points_.data() + i * dim(), dim()};
  }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const;
  std::size_t num_clusters() const { return num_clusters_; }
  const std::string& name() const { return name_; }

  /// Copy with the given point indices, in order (labels re-densified).
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  PointMatrix points_;
  std::optional<std::vector<int>> labels_;
  std::size_t num_clusters_ = 0;
  std::string name_;
};

enum class Family { ThreeLines, ThreeMoons, ThreeCircles, Circle };

std::string to_string(Family f);
Family parse_family(const std::string& s);

struct SyntheticSpec {
  Family family = Family::ThreeLines;
  std::vector<std::size_t> points_per_cluster;  // empty: family default
  std::size_t ambient_dim = 50;
  double noise_sigma = 0.14;
  std::uint64_t seed = 0;

  /// Per-cluster counts after applying family defaults.
  std::vector<std::size_t> counts() const;
};

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

/// Samples the family's planar manifolds uniformly, zero-pads into R^D and
/// adds i.i.d. N(0, sigma^2) noise to every coordinate.
Dataset generate(const SyntheticSpec& spec);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

struct CsvOptions {
  /// Column holding labels; negative counts from the end (-1 = last).
  std::optional<int> label_column;
  bool skip_header = false;
};

/// Reads a comma separated numeric table. Label values are arbitrary strings,
/// remapped to 0..l-1 (numeric order when all labels parse as numbers).
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes coordinates (shortest round-trip formatting), labels as last column.
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Descriptor emitted alongside generated data.
nlohmann::json describe(const Dataset& data, const nlohmann::json& provenance = {});

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace pwspm
