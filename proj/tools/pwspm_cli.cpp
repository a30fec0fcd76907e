// pwspm: command-line front end for the power-weighted path metric library.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pwspm/dataset.hpp"
#include "pwspm/euclidean_index.hpp"
#include "pwspm/experiments.hpp"
#include "pwspm/path_knn.hpp"
#include "pwspm/path_metrics.hpp"
#include "pwspm/similarity.hpp"
#include "pwspm/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pwspm;

namespace {

// Failed --check-* comparisons.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t env_or(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("environment variable ") + name + " is not a count: " + v);
  }
}

std::vector<std::string> split(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& csv, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& s : split(csv)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s[0] == '-') throw std::invalid_argument(flag + ": '" + s + "' is not a count");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<PowerParam> parse_powers(const std::string& csv, const std::string& flag) {
  try {
    return parse_power_list(csv);
  } catch (const std::exception& e) {
    throw std::invalid_argument(flag + ": " + e.what());
  }
}

// "1.2e-10", "0.0e0": one decimal, plain exponent.
std::string short_scientific(double v) {
  if (v == 0.0) return "0.0e0";
  int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
  double mantissa = v / std::pow(10.0, exponent);
  if (std::abs(mantissa) >= 9.95) {
    mantissa /= 10.0;
    ++exponent;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1fe%d", mantissa, exponent);
  return buf;
}

void write_file(const fs::path& path, const std::string& content, bool force) {
  if (fs::exists(path) && !force) {
    throw std::runtime_error("refusing to overwrite '" + path.string() + "' (pass --force)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: '" + path.string() + "'");
}

void append_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for appending");
  out << content;
}

// Effective value of every option of a subcommand, for the config echo.
json effective_config(const CLI::App& sub) {
  json options = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "--config" || name == "--force") continue;
    const std::string key = opt->get_lnames().empty() ? opt->get_single_name() : opt->get_lnames().front();
    if (opt->get_type_size_max() == 0) {
      options[key] = opt->count() > 0;
    } else if (opt->count() > 0) {
      options[key] = opt->results().back();
    } else {
      options[key] = opt->get_default_str();
    }
  }
  return {{"command", sub.get_name()}, {"options", options}};
}

// Rebuilds an argument vector from a config echo. Positionals first.
std::vector<std::string> replay_args(const json& cfg, const CLI::App& app) {
  const json& c = cfg.contains("config") ? cfg.at("config") : cfg;
  const std::string command = c.at("command").get<std::string>();
  const CLI::App* sub = app.get_subcommand(command);
  std::vector<std::string> args{command};
  const json& options = c.at("options");
  for (const CLI::Option* opt : sub->get_options()) {
    if (!opt->get_positional()) continue;
    const std::string key = opt->get_lnames().empty() ? opt->get_single_name() : opt->get_lnames().front();
    if (options.contains(key) && !options[key].get<std::string>().empty()) {
      args.push_back(options[key].get<std::string>());
    }
  }
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_positional() || opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (!options.contains(key)) continue;
    const json& v = options[key];
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back("--" + key);
    } else if (!v.get<std::string>().empty()) {
      args.push_back("--" + key);
      args.push_back(v.get<std::string>());
    }
  }
  return args;
}

struct DataArgs {
  std::string path;
  std::string label_column = "-1";
  bool skip_header = false;

  void add(CLI::App* sub, bool positional) {
    if (positional) {
      sub->add_option("data", path, "CSV file (coordinates, optional label column)")->required();
    } else {
      sub->add_option("--data", path, "CSV file instead of a synthetic family");
    }
    sub->add_option("--label-column", label_column,
                    "label column index (negative counts from the end) or 'none'");
    sub->add_flag("--skip-header", skip_header, "ignore the first CSV line");
  }

  Dataset load() const {
    CsvOptions o;
    o.skip_header = skip_header;
    if (label_column != "none") {
      try {
        o.label_column = std::stoi(label_column);
      } catch (const std::exception&) {
        throw std::invalid_argument("--label-column: expected an integer or 'none', got '" + label_column + "'");
      }
    }
    return load_csv(path, o);
  }
};

struct SyntheticArgs {
  std::string family = "three-lines";
  std::string n_per;
  std::size_t dim = 50;
  double sigma = 0.14;

  void add(CLI::App* sub, bool positional_family) {
    if (positional_family) {
      sub->add_option("family", family, "three-lines | three-moons | three-circles | circle")->required();
    } else {
      sub->add_option("--family", family, "three-lines | three-moons | three-circles | circle");
    }
    sub->add_option("--n-per", n_per, "points per cluster: one value or a comma list (default: family default)");
    sub->add_option("--dim", dim, "ambient dimension D");
    sub->add_option("--sigma", sigma, "noise standard deviation");
  }

  SyntheticSpec spec(std::uint64_t seed) const {
    SyntheticSpec s;
    s.family = parse_family(family);
    s.points_per_cluster = parse_counts(n_per, "--n-per");
    s.ambient_dim = dim;
    s.noise_sigma = sigma;
    s.seed = seed;
    s.counts();  // validates
    return s;
  }
};

struct SpectralArgs {
  std::string eigsolver = "auto";
  std::size_t restarts = 10;
  std::size_t max_iter = 300;

  void add(CLI::App* sub) {
    sub->add_option("--eigsolver", eigsolver, "auto | dense | iterative");
    sub->add_option("--restarts", restarts, "k-means restarts");
    sub->add_option("--max-iter", max_iter, "k-means iteration cap");
  }

  SpectralConfig config(std::size_t clusters, std::uint64_t seed) const {
    SpectralConfig c;
    c.num_clusters = clusters;
    c.eigsolver = parse_eigsolver(eigsolver);
    c.kmeans_restarts = restarts;
    c.kmeans_max_iter = max_iter;
    c.seed = seed;
    return c;
  }
};

std::string run_id(const std::string& command, const std::string& name, std::uint64_t seed) {
  return command + "-" + name + "-seed" + std::to_string(seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-weighted shortest path metrics: k-NN graphs and spectral clustering"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string config_path;
  bool force = false;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "replay the configuration embedded in an emitted JSON file");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads (default: PWSPM_THREADS or all cores)");
    sub->add_flag("--force", force, "overwrite existing output files");
  };

  // generate
  SyntheticArgs gen;
  std::string gen_out;
  CLI::App* generate_cmd = app.add_subcommand("generate", "write a synthetic dataset as CSV plus a JSON descriptor");
  gen.add(generate_cmd, true);
  generate_cmd->add_option("-o,--output", gen_out,
                           "CSV path (default: <family>-seed<seed>.csv); the descriptor goes next to it as .json");
  common(generate_cmd);

  // knn
  DataArgs knn_data;
  std::string knn_p = "2";
  std::size_t knn_k = 15;
  std::size_t knn_source = 0;
  bool knn_all = false, check_oracle = false, check_euclidean = false, quiet = false;
  std::size_t oracle_cap = 0;
  std::string knn_out;
  CLI::App* knn_cmd = app.add_subcommand("knn", "path-metric k nearest neighbours (source counts as one of the k)");
  knn_data.add(knn_cmd, true);
  knn_cmd->add_option("--p", knn_p, "power p >= 1 or 'inf'");
  knn_cmd->add_option("--k", knn_k, "neighbours per source, including the source");
  knn_cmd->add_option("--source", knn_source, "source point index");
  knn_cmd->add_flag("--all", knn_all, "every point as a source");
  knn_cmd->add_flag("--check-oracle", check_oracle, "compare with the exact all-pairs metric");
  knn_cmd->add_flag("--check-euclidean", check_euclidean, "compare with Euclidean k-NN (p = 1 only)");
  knn_cmd->add_option("--oracle-cap", oracle_cap, "largest n for the exact oracle (default: PWSPM_ORACLE_CAP or 2000)");
  knn_cmd->add_flag("--quiet", quiet, "print only the check summary");
  knn_cmd->add_option("-o,--output", knn_out, "write the listing to a file instead of stdout");
  common(knn_cmd);

  // cluster
  DataArgs cl_data;
  SpectralArgs cl_spec;
  std::string cl_p = "2", cl_variant = "knn", cl_out;
  std::size_t cl_k = kDefaultK, cl_r = kDefaultR, cl_clusters = 0;
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "spectral clustering of one dataset");
  cl_data.add(cluster_cmd, true);
  cluster_cmd->add_option("--p", cl_p, "power p >= 1 or 'inf'");
  cluster_cmd->add_option("--k", cl_k, "neighbours per point, including the point");
  cluster_cmd->add_option("--r", cl_r, "bandwidth neighbour rank");
  cluster_cmd->add_option("--clusters", cl_clusters, "number of clusters (default: from labels)");
  cluster_cmd->add_option("--variant", cl_variant, "knn | unweighted | full");
  cl_spec.add(cluster_cmd);
  cluster_cmd->add_option("-o,--output", cl_out, "JSON output path (default: stdout)");
  common(cluster_cmd);

  // table
  SyntheticArgs tb_syn;
  DataArgs tb_data;
  SpectralArgs tb_spec;
  std::string tb_p = "1,2,10,inf", tb_variants = "knn", tb_out_dir;
  std::size_t tb_trials = 0, tb_k = kDefaultK, tb_r = kDefaultR;
  CLI::App* table_cmd = app.add_subcommand("table", "repeated clustering trials, one row per (variant, p)");
  tb_syn.add(table_cmd, false);
  tb_data.add(table_cmd, false);
  table_cmd->add_option("--p", tb_p, "comma list of powers");
  table_cmd->add_option("--variants", tb_variants, "comma list of full, knn, unweighted");
  table_cmd->add_option("--trials", tb_trials, "trials (default: 50 synthetic, 10 loaded)");
  table_cmd->add_option("--k", tb_k, "neighbours per point, including the point");
  table_cmd->add_option("--r", tb_r, "bandwidth neighbour rank");
  tb_spec.add(table_cmd);
  table_cmd->add_option("--out-dir", tb_out_dir, "directory for the run JSON and the cumulative results table");
  common(table_cmd);

  // sweep
  SweepSpec sw;
  std::string sw_family = "three-lines", sw_dims = "10,50,100", sw_out, sw_out_dir;
  std::size_t sw_p_max = 20;
  SpectralArgs sw_spec;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "accuracy against p = 1..p-max for several ambient dimensions");
  sweep_cmd->add_option("--family", sw_family, "synthetic family");
  sweep_cmd->add_option("--dims", sw_dims, "comma list of ambient dimensions");
  sweep_cmd->add_option("--p-max", sw_p_max, "largest integer power");
  sweep_cmd->add_option("--n-per", sw.points_per_cluster, "points per cluster");
  sweep_cmd->add_option("--trials", sw.trials, "trials per (D, p)");
  sweep_cmd->add_option("--sigma", sw.noise_sigma, "noise standard deviation");
  sweep_cmd->add_option("--k", sw.k, "neighbours per point, including the point");
  sweep_cmd->add_option("--r", sw.r, "bandwidth neighbour rank");
  sw_spec.add(sweep_cmd);
  sweep_cmd->add_option("-o,--output", sw_out, "CSV path (default: stdout)");
  sweep_cmd->add_option("--out-dir", sw_out_dir, "directory for the run JSON");
  common(sweep_cmd);

  // separation
  SeparationSpec sep;
  std::string sep_family = "three-lines", sep_sizes = "250,500,1000", sep_p = "2", sep_out_dir;
  CLI::App* sep_cmd = app.add_subcommand("separation", "intra/inter-cluster path distance statistics (exact oracle)");
  sep_cmd->add_option("--family", sep_family, "synthetic family");
  sep_cmd->add_option("--sizes", sep_sizes, "comma list of total point counts");
  sep_cmd->add_option("--p", sep_p, "power p >= 1 or 'inf'");
  sep_cmd->add_option("--trials", sep.trials, "trials per size");
  sep_cmd->add_option("--dim", sep.ambient_dim, "ambient dimension");
  sep_cmd->add_option("--sigma", sep.noise_sigma, "noise standard deviation");
  sep_cmd->add_option("--oracle-cap", oracle_cap, "largest n for the exact oracle (default: PWSPM_ORACLE_CAP or 2000)");
  sep_cmd->add_option("--out-dir", sep_out_dir, "directory for the run JSON");
  common(sep_cmd);

  // bench
  std::string bench_family = "three-lines", bench_sizes = "5000,10000,20000", bench_p = "2", bench_out_dir;
  std::size_t bench_k = kDefaultK, bench_dim = 2;
  double bench_sigma = 0.14;
  CLI::App* bench_cmd = app.add_subcommand("bench", "wall time of the path k-NN graph and Euclidean queries against n");
  bench_cmd->add_option("--family", bench_family, "synthetic family");
  bench_cmd->add_option("--sizes", bench_sizes, "comma list of total point counts");
  bench_cmd->add_option("--p", bench_p, "power p >= 1 or 'inf'");
  bench_cmd->add_option("--k", bench_k, "neighbours per point, including the point");
  bench_cmd->add_option("--dim", bench_dim, "ambient dimension");
  bench_cmd->add_option("--sigma", bench_sigma, "noise standard deviation");
  bench_cmd->add_option("--out-dir", bench_out_dir, "directory for the run JSON");
  common(bench_cmd);

  // Replay: the emitted configuration becomes the argument list; anything
  // else on the command line is appended and wins.
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);  // CLI11 expects reversed order
  try {
    std::vector<std::string> forward(args.rbegin(), args.rend());
    for (std::size_t i = 0; i + 1 < forward.size(); ++i) {
      if (forward[i] != "--config") continue;
      std::ifstream in(forward[i + 1]);
      if (!in) throw std::runtime_error("cannot read config '" + forward[i + 1] + "'");
      const json cfg = json::parse(in);
      std::vector<std::string> rebuilt = replay_args(cfg, app);
      forward.erase(forward.begin() + static_cast<std::ptrdiff_t>(i),
                    forward.begin() + static_cast<std::ptrdiff_t>(i + 2));
      rebuilt.insert(rebuilt.end(), forward.begin(), forward.end());
      args.assign(rebuilt.rbegin(), rebuilt.rend());
      break;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* active = app.get_subcommands().front();
  const json config = effective_config(*active);

  try {
    if (threads == 0) threads = env_or("PWSPM_THREADS", 0);
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
    if (oracle_cap == 0) oracle_cap = env_or("PWSPM_ORACLE_CAP", kDefaultOracleCap);

    if (active == generate_cmd) {
      const SyntheticSpec spec = gen.spec(seed);
      const Dataset data = generate(spec);
      const fs::path csv =
          gen_out.empty() ? fs::path(gen.family + "-seed" + std::to_string(seed) + ".csv") : fs::path(gen_out);
      fs::path desc = csv;
      desc.replace_extension(".json");
      if (!force) {
        for (const auto& p : {csv, desc}) {
          if (fs::exists(p)) throw std::runtime_error("refusing to overwrite '" + p.string() + "' (pass --force)");
        }
      }
      if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
      save_csv(data, csv);
      json j = describe(data, {{"spec", to_json(spec)}});
      j["config"] = config;
      write_file(desc, j.dump(2) + "\n", true);
      std::cerr << "wrote " << data.size() << " points (D=" << data.dim() << ") to " << csv.string() << "\n";
      return 0;
    }

    if (active == knn_cmd) {
      const Dataset data = knn_data.load();
      const PowerParam p = PowerParam::parse(knn_p);
      if (knn_k < 1 || knn_k >= data.size()) {
        throw std::invalid_argument("--k must satisfy 1 <= k <= n-1 (n=" + std::to_string(data.size()) + ")");
      }
      if (check_euclidean && !(!p.is_infinite() && p.value() == 1.0)) {
        throw std::invalid_argument("--check-euclidean applies to --p 1 only");
      }
      const SpatialIndex index = build_index(data);
      std::vector<PathNeighborResult> results;
      if (knn_all) {
        results = path_knn_all(index, knn_k, p);
      } else {
        if (knn_source >= data.size()) throw std::out_of_range("--source out of range");
        results.push_back(path_knn(index, knn_source, knn_k, p));
      }
      if (!quiet) {
        std::ostringstream listing;
        for (const auto& r : results) {
          for (const auto& nb : r.neighbors) {
            listing << r.source << '\t' << nb.index << '\t' << format_double(nb.distance) << '\n';
          }
        }
        if (knn_out.empty()) {
          std::cout << listing.str();
        } else {
          write_file(knn_out, listing.str(), force);
        }
      }
      bool failed = false;
      if (check_oracle) {
        if (data.size() > oracle_cap) {
          throw std::invalid_argument("n=" + std::to_string(data.size()) + " exceeds the oracle cap " +
                                      std::to_string(oracle_cap));
        }
        const DistanceMatrix exact = pairwise_exact(data, p, oracle_cap);
        double worst = 0.0;
        std::size_t mismatched = 0;
        for (const auto& r : results) {
          std::vector<double> row(exact.values.cols());
          for (Eigen::Index j = 0; j < exact.values.cols(); ++j) row[j] = exact.values(r.source, j);
          std::vector<double> sorted = row;
          std::sort(sorted.begin(), sorted.end());
          const double kth = sorted[knn_k - 1];
          for (const auto& nb : r.neighbors) {
            const double want = row[nb.index];
            const double dev = std::abs(nb.distance - want) / std::max(want, 1e-300);
            worst = std::max(worst, want == 0.0 ? nb.distance : dev);
            if (want > kth * (1 + 1e-9)) ++mismatched;
          }
        }
        std::cout << "max deviation " << short_scientific(worst) << "\n";
        std::cout << "set mismatches " << mismatched << "\n";
        failed = failed || mismatched > 0 || worst > 1e-9;
      }
      if (check_euclidean) {
        double worst = 0.0;
        std::size_t mismatched = 0;
        for (const auto& r : results) {
          const NeighborList e = knn(index, r.source, knn_k - 1);
          for (std::size_t j = 0; j + 1 < knn_k; ++j) {
            mismatched += r.neighbors[j + 1].index != e.neighbors[j].index;
            worst = std::max(worst, std::abs(r.neighbors[j + 1].distance - e.neighbors[j].distance) /
                                        std::max(e.neighbors[j].distance, 1e-300));
          }
        }
        std::cout << "euclidean max deviation " << short_scientific(worst) << "\n";
        std::cout << "euclidean mismatches " << mismatched << "\n";
        failed = failed || mismatched > 0 || worst > 1e-12;
      }
      if (failed) throw CheckFailed("check failed");
      return 0;
    }

    if (active == cluster_cmd) {
      const Dataset data = cl_data.load();
      const PowerParam p = PowerParam::parse(cl_p);
      const Variant variant = parse_variant(cl_variant);
      std::size_t clusters = cl_clusters;
      if (clusters == 0) {
        if (!data.has_labels()) throw std::invalid_argument("--clusters is required for unlabelled data");
        clusters = data.num_clusters();
      }
      const SpectralConfig sc = cl_spec.config(clusters, seed);
      const std::vector<int>* truth = data.has_labels() ? &data.labels() : nullptr;
      const auto t0 = std::chrono::steady_clock::now();
      ClusteringResult res;
      if (variant == Variant::Full) {
        const Eigen::MatrixXd a = build_full_similarity(data, cl_r);
        const double build = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res = spectral_cluster(a, sc, truth);
        res.timings.graph_build = build;
      } else {
        const SpatialIndex index = build_index(data);
        const SparseSimilarity s = variant == Variant::Knn ? build_knn_similarity(index, cl_k, cl_r, p)
                                                           : build_unweighted_knn(index, cl_k, p);
        const double build = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res = spectral_cluster(s, sc, truth);
        res.timings.graph_build = build;
      }
      json j{{"config", config}, {"dataset", describe(data)}, {"result", to_json(res, true)}};
      if (cl_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        write_file(cl_out, j.dump(2) + "\n", force);
      }
      if (res.accuracy) std::cerr << "accuracy " << *res.accuracy << "\n";
      return 0;
    }

    if (active == table_cmd) {
      TableSpec t;
      if (!tb_data.path.empty()) {
        t.loaded = tb_data.load();
      } else {
        t.synthetic = tb_syn.spec(seed);
      }
      t.powers = parse_powers(tb_p, "--p");
      t.variants.clear();
      for (const auto& v : split(tb_variants)) t.variants.push_back(parse_variant(v));
      t.trials = tb_trials ? tb_trials : (t.loaded ? 10 : 50);
      t.k = tb_k;
      t.r = tb_r;
      t.seed = seed;
      t.spectral = tb_spec.config(0, seed);
      const auto reports = run_table_experiment(t);
      const std::string text = format_table(reports);
      std::cout << text;
      if (!tb_out_dir.empty()) {
        json j{{"config", config}, {"experiment", to_json(t)}, {"reports", json::array()}};
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        const std::string name = t.loaded ? t.loaded->name() : to_string(t.synthetic->family);
        write_file(fs::path(tb_out_dir) / (run_id("table", name, seed) + ".json"), j.dump(2) + "\n", force);
        append_file(fs::path(tb_out_dir) / "results.txt", text);
      }
      return 0;
    }

    if (active == sweep_cmd) {
      sw.family = parse_family(sw_family);
      sw.dims = parse_counts(sw_dims, "--dims");
      sw.powers.clear();
      for (std::size_t p = 1; p <= sw_p_max; ++p) sw.powers.push_back(PowerParam::finite(static_cast<double>(p)));
      sw.seed = seed;
      sw.spectral = sw_spec.config(0, seed);
      const auto rows = run_p_sweep(sw);
      const std::string csv = sweep_csv(rows);
      if (sw_out.empty()) {
        std::cout << csv;
      } else {
        write_file(sw_out, csv, force);
      }
      if (!sw_out_dir.empty()) {
        json j{{"config", config}, {"experiment", to_json(sw)}, {"rows", json::array()}};
        for (const auto& r : rows) {
          j["rows"].push_back({{"p", r.p.to_string()}, {"D", r.dim}, {"mean_acc", r.mean_acc}, {"std", r.std}});
        }
        write_file(fs::path(sw_out_dir) / (run_id("sweep", sw_family, seed) + ".json"), j.dump(2) + "\n", force);
      }
      return 0;
    }

    if (active == sep_cmd) {
      sep.family = parse_family(sep_family);
      sep.sizes = parse_counts(sep_sizes, "--sizes");
      sep.p = PowerParam::parse(sep_p);
      sep.seed = seed;
      sep.oracle_cap = oracle_cap;
      const auto rows = run_separation_experiment(sep);
      json j{{"config", config}, {"experiment", to_json(sep)}, {"rows", json::array()}};
      std::printf("%-8s %-34s %s\n", "n", "eps1 median [q1, q3]", "eps2 median [q1, q3]");
      for (const auto& r : rows) {
        j["rows"].push_back(to_json(r));
        char e1[64], e2[64] = "-";
        std::snprintf(e1, sizeof e1, "%.6g [%.6g, %.6g]", r.eps1_q.median, r.eps1_q.q1, r.eps1_q.q3);
        if (r.eps2_q) {
          std::snprintf(e2, sizeof e2, "%.6g [%.6g, %.6g]", r.eps2_q->median, r.eps2_q->q1, r.eps2_q->q3);
        }
        std::printf("%-8zu %-34s %s\n", r.n, e1, e2);
      }
      if (!sep_out_dir.empty()) {
        write_file(fs::path(sep_out_dir) / (run_id("separation", sep_family, seed) + ".json"), j.dump(2) + "\n",
                   force);
      }
      return 0;
    }

    if (active == bench_cmd) {
      const PowerParam p = PowerParam::parse(bench_p);
      json j{{"config", config}, {"rows", json::array()}};
      double previous = 0.0;
      std::printf("%-8s %-14s %-10s %s\n", "n", "graph (s)", "ratio", "mean query (us)");
      for (std::size_t n : parse_counts(bench_sizes, "--sizes")) {
        SyntheticSpec s;
        s.family = parse_family(bench_family);
        const std::size_t clusters = s.counts().size();
        s.points_per_cluster.assign(clusters, n / clusters);
        s.ambient_dim = bench_dim;
        s.noise_sigma = bench_sigma;
        s.seed = seed;
        const Dataset data = generate(s);
        const auto t0 = std::chrono::steady_clock::now();
        const SpatialIndex index = build_index(data);
        const auto graph = path_knn_all(index, bench_k, p);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto q0 = std::chrono::steady_clock::now();
        const std::size_t queries = std::min<std::size_t>(2000, data.size());
        for (std::size_t q = 0; q < queries; ++q) (void)index.knn(q * (data.size() / queries), bench_k);
        const double query_us =
            1e6 * std::chrono::duration<double>(std::chrono::steady_clock::now() - q0).count() / queries;
        const double ratio = previous > 0.0 ? seconds / previous : 0.0;
        std::printf("%-8zu %-14.4f %-10s %.3f\n", data.size(), seconds,
                    previous > 0.0 ? std::to_string(ratio).substr(0, 5).c_str() : "-", query_us);
        j["rows"].push_back({{"n", data.size()}, {"graph_seconds", seconds}, {"ratio", ratio},
                             {"mean_query_us", query_us}, {"results", graph.size()}});
        previous = seconds;
      }
      if (!bench_out_dir.empty()) {
        write_file(fs::path(bench_out_dir) / (run_id("bench", bench_family, seed) + ".json"), j.dump(2) + "\n",
                   force);
      }
      return 0;
    }
  } catch (const CheckFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
