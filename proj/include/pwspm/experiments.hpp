#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwspm/dataset.hpp"
#include "pwspm/path_metrics.hpp"
#include "pwspm/spectral.hpp"

namespace pwspm {

// Full: dense Euclidean locally scaled kernel (p is ignored).
// Knn: weighted k-NN graph under d^(p). Unweighted: 0/1 k-NN graph under d^(p).
enum class Variant { Full, Knn, Unweighted };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct TrialReport {
  std::string dataset;
  PowerParam p = PowerParam::finite(1.0);
  Variant variant = Variant::Knn;
  std::vector<double> accuracies;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  StageTimings mean_timings;
  std::vector<std::uint64_t> seeds;  // per-trial seeds
};

nlohmann::json to_json(const TrialReport& r);

/// Exactly one of `synthetic` / `loaded` is set. Synthetic data is redrawn
/// each trial with a derived seed; loaded data stays fixed and only the
/// pipeline seed changes.
struct TableSpec {
  std::optional<SyntheticSpec> synthetic;
  std::optional<Dataset> loaded;
  std::vector<PowerParam> powers;
  std::vector<Variant> variants{Variant::Knn};
  std::size_t trials = 50;
  std::size_t k = 15;
  std::size_t r = 10;
  std::uint64_t seed = 0;
  SpectralConfig spectral;  // num_clusters 0: taken from the data labels
};

nlohmann::json to_json(const TableSpec& spec);

/// One report per (variant, p) in input order; the Full variant contributes a
/// single report regardless of the p list.
std::vector<TrialReport> run_table_experiment(const TableSpec& spec);

/// Aligned text rendering: one line per report, "mean ± std" in percent.
std::string format_table(const std::vector<TrialReport>& reports);

struct SweepRow {
  PowerParam p = PowerParam::finite(1.0);
  std::size_t dim = 0;
  double mean_acc = 0.0;
  double std = 0.0;
};

struct SweepSpec {
  Family family = Family::ThreeLines;
  std::size_t points_per_cluster = 300;
  std::vector<std::size_t> dims{10, 50, 100};
  std::vector<PowerParam> powers;  // empty: 1, 2, ..., 20
  std::size_t trials = 50;
  std::size_t k = 15;
  std::size_t r = 10;
  double noise_sigma = 0.14;
  std::uint64_t seed = 0;
  SpectralConfig spectral;
};

nlohmann::json to_json(const SweepSpec& spec);
std::vector<SweepRow> run_p_sweep(const SweepSpec& spec);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

Quartiles quartiles(std::vector<double> values);

struct SeparationRow {
  std::size_t n = 0;
  std::vector<double> eps1;
  std::vector<double> eps2;  // empty for single-cluster families
  Quartiles eps1_q;
  std::optional<Quartiles> eps2_q;
};

struct SeparationSpec {
  Family family = Family::ThreeLines;
  std::vector<std::size_t> sizes;  // total point counts, split evenly over clusters
  PowerParam p = PowerParam::finite(2.0);
  std::size_t trials = 10;
  std::size_t ambient_dim = 2;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = kDefaultOracleCap;
};

nlohmann::json to_json(const SeparationSpec& spec);
std::vector<SeparationRow> run_separation_experiment(const SeparationSpec& spec);
nlohmann::json to_json(const SeparationRow& row);

double mean(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

}  // namespace pwspm
