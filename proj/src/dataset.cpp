#include "pwspm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "pwspm/random.hpp"

namespace pwspm {

namespace {

std::size_t densify(std::vector<int>& labels) {
  std::vector<int> distinct(labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (int& l : labels) {
    l = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), l) - distinct.begin());
  }
  return distinct.size();
}

}  // namespace

Dataset::Dataset(PointMatrix points, std::optional<std::vector<int>> labels, std::string name)
    : points_(std::move(points)), labels_(std::move(labels)), name_(std::move(name)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw std::invalid_argument("dataset needs n >= 1 points of dimension D >= 1");
  }
  if (!points_.allFinite()) throw std::invalid_argument("dataset coordinates must be finite");
  if (labels_) {
    if (labels_->size() != size()) {
      throw std::invalid_argument("label count " + std::to_string(labels_->size()) +
                                  " does not match point count " + std::to_string(size()));
    }
    for (int l : *labels_) {
      if (l < 0) throw std::invalid_argument("labels must be non-negative");
    }
    std::vector<int> dense(*labels_);
    num_clusters_ = densify(dense);
    if (dense != *labels_) {
      throw std::invalid_argument("labels must be 0..l-1 with every cluster non-empty");
    }
  }
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw std::logic_error("dataset '" + name_ + "' has no labels");
  return *labels_;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  PointMatrix pts(static_cast<Eigen::Index>(indices.size()), points_.cols());
  std::optional<std::vector<int>> lab;
  if (labels_) lab.emplace();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw std::out_of_range("subset index out of range");
    pts.row(static_cast<Eigen::Index>(r)) = points_.row(static_cast<Eigen::Index>(indices[r]));
    if (lab) lab->push_back((*labels_)[indices[r]]);
  }
  if (lab) densify(*lab);
  return Dataset(std::move(pts), std::move(lab), name_ + "-subset");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::ThreeLines: return "three-lines";
    case Family::ThreeMoons: return "three-moons";
    case Family::ThreeCircles: return "three-circles";
    case Family::Circle: return "circle";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::ThreeLines, Family::ThreeMoons, Family::ThreeCircles, Family::Circle}) {
    if (s == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown dataset family '" + s + "'");
}

std::vector<std::size_t> SyntheticSpec::counts() const {
  const std::size_t clusters = family == Family::Circle ? 1 : 3;
  std::vector<std::size_t> c = points_per_cluster;
  if (c.empty()) {
    if (family == Family::ThreeCircles) {
      c = {222, 500, 778};
    } else {
      c.assign(clusters, 500);
    }
  } else if (c.size() == 1) {
    c.assign(clusters, c.front());
  }
  if (c.size() != clusters) {
    throw std::invalid_argument(to_string(family) + " needs " + std::to_string(clusters) +
                                " cluster counts, got " + std::to_string(c.size()));
  }
  for (std::size_t v : c) {
    if (v == 0) throw std::invalid_argument("cluster counts must be positive");
  }
  return c;
}

nlohmann::json to_json(const SyntheticSpec& spec) {
  return {{"family", to_string(spec.family)},
          {"points_per_cluster", spec.counts()},
          {"ambient_dim", spec.ambient_dim},
          {"noise_sigma", spec.noise_sigma},
          {"seed", spec.seed}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.points_per_cluster = j.value("points_per_cluster", std::vector<std::size_t>{});
  spec.ambient_dim = j.value("ambient_dim", spec.ambient_dim);
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

Dataset generate(const SyntheticSpec& spec) {
  if (spec.ambient_dim < 2) throw std::invalid_argument("ambient_dim must be at least 2");
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw std::invalid_argument("noise_sigma must be finite and non-negative");
  }
  const std::vector<std::size_t> counts = spec.counts();
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;

  constexpr double pi = std::numbers::pi;
  Rng rng = make_rng(spec.seed);
  PointMatrix pts = PointMatrix::Zero(static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(spec.ambient_dim));
  std::vector<int> labels(n);

  // Arc-length parameterisations; lines and circular arcs are uniform in
  // their parameter, which is uniform in arc length.
  auto place = [&](std::size_t cluster, double& x, double& y) {
    switch (spec.family) {
      case Family::ThreeLines:
        x = uniform(rng, 0.0, 5.0);
        y = static_cast<double>(cluster);
        return;
      case Family::ThreeMoons: {
        const double theta = uniform(rng, 0.0, pi);
        if (cluster == 0) {
          x = std::cos(theta);
          y = std::sin(theta);
        } else if (cluster == 1) {
          x = 1.5 + 1.5 * std::cos(theta + pi);
          y = 0.4 + 1.5 * std::sin(theta + pi);
        } else {
          x = 3.0 + std::cos(theta);
          y = std::sin(theta);
        }
        return;
      }
      case Family::ThreeCircles: {
        static constexpr double radii[3] = {1.0, 2.25, 3.5};
        const double theta = uniform(rng, 0.0, 2.0 * pi);
        x = radii[cluster] * std::cos(theta);
        y = radii[cluster] * std::sin(theta);
        return;
      }
      case Family::Circle: {
        const double theta = uniform(rng, 0.0, 2.0 * pi);
        x = std::cos(theta);
        y = std::sin(theta);
        return;
      }
    }
  };

  std::size_t row = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i, ++row) {
      double x = 0.0;
      double y = 0.0;
      place(c, x, y);
      pts(static_cast<Eigen::Index>(row), 0) = x;
      pts(static_cast<Eigen::Index>(row), 1) = y;
      labels[row] = static_cast<int>(c);
    }
  }
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      for (Eigen::Index d = 0; d < pts.cols(); ++d) pts(i, d) += normal(rng, 0.0, spec.noise_sigma);
    }
  }
  return Dataset(std::move(pts), std::move(labels), to_string(spec.family));
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view f) {
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) return std::nullopt;
  return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t columns = 0;
  std::size_t label_col = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && options.skip_header) continue;
    std::string_view view(line);
    if (view.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto fields = split_fields(view);
    if (columns == 0) {
      columns = fields.size();
      if (options.label_column) {
        const int c = *options.label_column;
        const long resolved = c < 0 ? static_cast<long>(columns) + c : c;
        if (resolved < 0 || resolved >= static_cast<long>(columns)) {
          throw ParseError("label column " + std::to_string(c) + " out of range for " +
                               std::to_string(columns) + " columns",
                           line_no);
        }
        label_col = static_cast<std::size_t>(resolved);
        if (columns < 2) throw ParseError("no feature columns besides the label", line_no);
      }
    } else if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (options.label_column && c == label_col) {
        if (fields[c].empty()) throw ParseError("empty label", line_no);
        raw_labels.emplace_back(fields[c]);
        continue;
      }
      const auto v = parse_number(fields[c]);
      if (!v) {
        throw ParseError("non-numeric field '" + std::string(fields[c]) + "' in column " +
                             std::to_string(c),
                         line_no);
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("empty file '" + path.string() + "'", line_no);

  const std::size_t dim = columns - (options.label_column ? 1 : 0);
  PointMatrix pts(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  std::copy(values.begin(), values.end(), pts.data());

  std::optional<std::vector<int>> labels;
  if (options.label_column) {
    std::vector<std::string> distinct(raw_labels);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                     [](const std::string& s) { return parse_number(s).has_value(); });
    if (numeric) {
      std::stable_sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
        return *parse_number(a) < *parse_number(b);
      });
    }
    std::map<std::string, int> ids;
    for (std::size_t i = 0; i < distinct.size(); ++i) ids[distinct[i]] = static_cast<int>(i);
    labels.emplace();
    labels->reserve(raw_labels.size());
    for (const auto& l : raw_labels) labels->push_back(ids.at(l));
  }
  return Dataset(std::move(pts), std::move(labels), path.stem().string());
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    const auto r = data.row(i);
    for (std::size_t d = 0; d < r.size(); ++d) {
      if (d) line += ',';
      line += format_double(r[d]);
    }
    if (data.has_labels()) {
      line += ',';
      line += std::to_string(data.labels()[i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

nlohmann::json describe(const Dataset& data, const nlohmann::json& provenance) {
  nlohmann::json j = {{"name", data.name()},
                      {"n", data.size()},
                      {"D", data.dim()},
                      {"num_clusters", data.num_clusters()}};
  if (data.has_labels()) {
    std::vector<std::size_t> sizes(data.num_clusters(), 0);
    for (int l : data.labels()) ++sizes[static_cast<std::size_t>(l)];
    j["cluster_sizes"] = sizes;
  }
  j["provenance"] = provenance.is_null() ? nlohmann::json::object() : provenance;
  return j;
}

}  // namespace pwspm
