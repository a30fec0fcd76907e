#include "pwspm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pwspm/euclidean_index.hpp"
#include "pwspm/random.hpp"
#include "pwspm/similarity.hpp"

namespace pwspm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs body(i) for i in [0, count) on the OpenMP pool and rethrows the first
// exception on the calling thread.
template <class Body>
void parallel_trials(std::size_t count, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(pwspm_trial_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Cell {
  PowerParam p;
  Variant variant;
};

std::vector<Cell> expand_cells(const TableSpec& spec) {
  std::vector<Cell> cells;
  for (Variant v : spec.variants) {
    if (v == Variant::Full) {
      cells.push_back({PowerParam::finite(1.0), v});
      continue;
    }
    for (const PowerParam& p : spec.powers) cells.push_back({p, v});
  }
  return cells;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Knn: return "knn";
    case Variant::Unweighted: return "unweighted";
  }
  return "knn";
}

Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::Full;
  if (s == "knn") return Variant::Knn;
  if (s == "unweighted") return Variant::Unweighted;
  throw std::invalid_argument("unknown variant '" + s + "' (expected full, knn or unweighted)");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  // Linear interpolation between order statistics.
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

nlohmann::json to_json(const TrialReport& r) {
  return {{"dataset", r.dataset},
          {"p", r.p.to_string()},
          {"variant", to_string(r.variant)},
          {"trials", r.accuracies.size()},
          {"accuracies", r.accuracies},
          {"mean", r.mean},
          {"std", r.std},
          {"mean_timings",
           {{"graph_build", r.mean_timings.graph_build},
            {"eigen", r.mean_timings.eigen},
            {"kmeans", r.mean_timings.kmeans},
            {"total", r.mean_timings.total()}}},
          {"seeds", r.seeds}};
}

nlohmann::json to_json(const TableSpec& spec) {
  nlohmann::json j;
  if (spec.synthetic) j["synthetic"] = to_json(*spec.synthetic);
  if (spec.loaded) j["loaded"] = describe(*spec.loaded);
  std::vector<std::string> ps;
  for (const auto& p : spec.powers) ps.push_back(p.to_string());
  std::vector<std::string> vs;
  for (auto v : spec.variants) vs.push_back(to_string(v));
  j["powers"] = ps;
  j["variants"] = vs;
  j["trials"] = spec.trials;
  j["k"] = spec.k;
  j["r"] = spec.r;
  j["seed"] = spec.seed;
  j["spectral"] = to_json(spec.spectral);
  return j;
}

std::vector<TrialReport> run_table_experiment(const TableSpec& spec) {
  if (spec.synthetic.has_value() == spec.loaded.has_value()) {
    throw std::invalid_argument("table experiment needs exactly one of a synthetic spec or a loaded dataset");
  }
  if (spec.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (spec.loaded && !spec.loaded->has_labels()) {
    throw std::invalid_argument("table experiment needs ground-truth labels");
  }
  const std::vector<Cell> cells = expand_cells(spec);
  if (cells.empty()) throw std::invalid_argument("no (variant, p) combinations requested");
  const bool needs_knn = std::any_of(cells.begin(), cells.end(),
                                     [](const Cell& c) { return c.variant != Variant::Full; });

  // results[cell][trial]
  std::vector<std::vector<double>> acc(cells.size(), std::vector<double>(spec.trials));
  std::vector<std::vector<StageTimings>> times(cells.size(), std::vector<StageTimings>(spec.trials));
  std::vector<std::uint64_t> seeds(spec.trials);
  std::string name;

  for (std::size_t t = 0; t < spec.trials; ++t) seeds[t] = derive_seed(spec.seed, t);
  if (spec.loaded) {
    name = spec.loaded->name();
  } else {
    name = to_string(spec.synthetic->family);
  }

  parallel_trials(spec.trials, [&](std::size_t t) {
    std::optional<Dataset> fresh;
    if (spec.synthetic) {
      SyntheticSpec s = *spec.synthetic;
      s.seed = derive_seed(seeds[t], 0);
      fresh.emplace(generate(s));
    }
    const Dataset& data = fresh ? *fresh : *spec.loaded;
    SpectralConfig sc = spec.spectral;
    if (sc.num_clusters == 0) sc.num_clusters = data.num_clusters();
    sc.seed = derive_seed(seeds[t], 1);

    std::optional<SpatialIndex> index;
    std::optional<EuclideanKnnTable> table;
    double shared_seconds = 0.0;
    if (needs_knn) {
      const auto t0 = Clock::now();
      index.emplace(build_index(data));
      table.emplace(*index, std::max(spec.k, spec.r + 1));
      shared_seconds = seconds_since(t0);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto t0 = Clock::now();
      ClusteringResult res;
      if (cells[c].variant == Variant::Full) {
        const Eigen::MatrixXd a = build_full_similarity(data, spec.r);
        const double build = seconds_since(t0);
        res = spectral_cluster(a, sc, &data.labels());
        res.timings.graph_build = build;
      } else {
        const SparseSimilarity s = cells[c].variant == Variant::Knn
                                       ? build_knn_similarity(*table, spec.k, spec.r, cells[c].p)
                                       : build_unweighted_knn(*table, spec.k, cells[c].p);
        const double build = seconds_since(t0) + shared_seconds;
        res = spectral_cluster(s, sc, &data.labels());
        res.timings.graph_build = build;
      }
      acc[c][t] = *res.accuracy;
      times[c][t] = res.timings;
    }
  });

  std::vector<TrialReport> reports;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    TrialReport r;
    r.dataset = name;
    r.p = cells[c].p;
    r.variant = cells[c].variant;
    r.accuracies = acc[c];
    r.mean = mean(r.accuracies);
    r.std = sample_std(r.accuracies);
    for (const auto& tm : times[c]) {
      r.mean_timings.graph_build += tm.graph_build;
      r.mean_timings.eigen += tm.eigen;
      r.mean_timings.kmeans += tm.kmeans;
    }
    const auto count = static_cast<double>(spec.trials);
    r.mean_timings.graph_build /= count;
    r.mean_timings.eigen /= count;
    r.mean_timings.kmeans /= count;
    r.seeds = seeds;
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string format_table(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "dataset" << std::setw(12) << "variant" << std::setw(6) << "p"
      << std::setw(8) << "trials" << std::setw(20) << "accuracy (%)" << "time (s)\n";
  for (const auto& r : reports) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(2) << 100.0 * r.mean << " ± " << 100.0 * r.std;
    std::ostringstream secs;
    secs << std::fixed << std::setprecision(3) << r.mean_timings.total();
    out << std::left << std::setw(16) << r.dataset << std::setw(12) << to_string(r.variant)
        << std::setw(6) << (r.variant == Variant::Full ? std::string("-") : r.p.to_string())
        << std::setw(8) << r.accuracies.size() << std::setw(21) << cell.str() << secs.str() << "\n";
  }
  return out.str();
}

nlohmann::json to_json(const SweepSpec& spec) {
  std::vector<std::string> ps;
  for (const auto& p : spec.powers) ps.push_back(p.to_string());
  return {{"family", to_string(spec.family)}, {"points_per_cluster", spec.points_per_cluster},
          {"dims", spec.dims},                {"powers", ps},
          {"trials", spec.trials},            {"k", spec.k},
          {"r", spec.r},                      {"noise_sigma", spec.noise_sigma},
          {"seed", spec.seed},                {"spectral", to_json(spec.spectral)}};
}

std::vector<SweepRow> run_p_sweep(const SweepSpec& spec) {
  std::vector<PowerParam> powers = spec.powers;
  if (powers.empty()) {
    for (int p = 1; p <= 20; ++p) powers.push_back(PowerParam::finite(p));
  }
  std::vector<SweepRow> rows;
  for (std::size_t d = 0; d < spec.dims.size(); ++d) {
    TableSpec t;
    SyntheticSpec s;
    s.family = spec.family;
    s.points_per_cluster = {spec.points_per_cluster};
    s.ambient_dim = spec.dims[d];
    s.noise_sigma = spec.noise_sigma;
    t.synthetic = s;
    t.powers = powers;
    t.variants = {Variant::Knn};
    t.trials = spec.trials;
    t.k = spec.k;
    t.r = spec.r;
    t.seed = derive_seed(spec.seed, spec.dims[d]);
    t.spectral = spec.spectral;
    for (const auto& rep : run_table_experiment(t)) {
      rows.push_back({rep.p, spec.dims[d], rep.mean, rep.std});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "p,D,mean_acc,std\n";
  for (const auto& r : rows) {
    out << r.p.to_string() << ',' << r.dim << ',' << format_double(r.mean_acc) << ','
        << format_double(r.std) << '\n';
  }
  return out.str();
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << sweep_csv(rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json to_json(const SeparationSpec& spec) {
  return {{"family", to_string(spec.family)}, {"sizes", spec.sizes},
          {"p", spec.p.to_string()},          {"trials", spec.trials},
          {"ambient_dim", spec.ambient_dim},  {"noise_sigma", spec.noise_sigma},
          {"seed", spec.seed},                {"oracle_cap", spec.oracle_cap}};
}

nlohmann::json to_json(const SeparationRow& row) {
  auto q = [](const Quartiles& x) {
    return nlohmann::json{{"q1", x.q1}, {"median", x.median}, {"q3", x.q3}};
  };
  nlohmann::json j{{"n", row.n}, {"eps1", row.eps1}, {"eps1_quartiles", q(row.eps1_q)}};
  if (row.eps2_q) {
    j["eps2"] = row.eps2;
    j["eps2_quartiles"] = q(*row.eps2_q);
  }
  return j;
}

std::vector<SeparationRow> run_separation_experiment(const SeparationSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("trials must be at least 1");
  SyntheticSpec base;
  base.family = spec.family;
  base.ambient_dim = spec.ambient_dim;
  base.noise_sigma = spec.noise_sigma;
  const std::size_t clusters = base.counts().size();

  std::vector<SeparationRow> rows;
  for (std::size_t n : spec.sizes) {
    if (n < 2 * clusters) throw std::invalid_argument("separation experiment size too small");
    if (n > spec.oracle_cap) {
      throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the oracle cap " +
                                  std::to_string(spec.oracle_cap));
    }
    SeparationRow row;
    row.n = n;
    row.eps1.resize(spec.trials);
    std::vector<std::optional<double>> eps2(spec.trials);
    parallel_trials(spec.trials, [&](std::size_t t) {
      SyntheticSpec s = base;
      // Even split; the first clusters take the remainder.
      s.points_per_cluster.assign(clusters, n / clusters);
      for (std::size_t c = 0; c < n % clusters; ++c) ++s.points_per_cluster[c];
      s.seed = derive_seed(derive_seed(spec.seed, n), t);
      const Dataset data = generate(s);
      const SeparationStats st = intra_inter_stats(data, spec.p, spec.oracle_cap);
      row.eps1[t] = st.eps1;
      eps2[t] = st.eps2;
    });
    row.eps1_q = quartiles(row.eps1);
    if (clusters > 1) {
      for (const auto& e : eps2) row.eps2.push_back(*e);
      row.eps2_q = quartiles(row.eps2);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pwspm
