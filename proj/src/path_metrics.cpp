#include "pwspm/path_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pwspm/euclidean_index.hpp"

namespace pwspm {

PowerParam PowerParam::finite(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw std::invalid_argument("power p must be finite and >= 1 (use infinity() for LLPD)");
  }
  PowerParam out;
  out.p_ = p;
  out.infinite_ = false;
  return out;
}

PowerParam PowerParam::parse(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "infinity") return infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid power '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("invalid power '" + text + "'");
  return finite(v);
}

double PowerParam::value() const {
  if (infinite_) throw std::logic_error("PowerParam is infinite");
  return p_;
}

std::string PowerParam::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

std::vector<PowerParam> parse_power_list(const std::string& csv) {
  std::vector<PowerParam> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(PowerParam::parse(item));
  }
  if (out.empty()) throw std::invalid_argument("empty power list");
  return out;
}

double path_length(const std::vector<double>& legs, PowerParam p) {
  if (legs.empty()) throw std::invalid_argument("a path needs at least one leg");
  const double longest = *std::max_element(legs.begin(), legs.end());
  if (p.is_infinite()) return longest;
  if (longest == 0.0) return 0.0;
  // Normalising by the longest leg keeps large exponents in range.
  const double q = p.value();
  double sum = 0.0;
  for (double l : legs) sum += std::pow(l / longest, q);
  return longest * std::pow(sum, 1.0 / q);
}

double path_length(const Dataset& data, const Path& path, PowerParam p) {
  if (path.indices.size() < 2) throw std::invalid_argument("a path needs at least 2 points");
  std::vector<double> legs;
  legs.reserve(path.indices.size() - 1);
  for (std::size_t j = 0; j + 1 < path.indices.size(); ++j) {
    const std::size_t a = path.indices[j];
    const std::size_t b = path.indices[j + 1];
    if (a >= data.size() || b >= data.size()) throw std::out_of_range("path index out of range");
    legs.push_back(euclidean_distance(data.row(a), data.row(b)));
  }
  return path_length(legs, p);
}

Eigen::MatrixXd pairwise_euclidean(const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = euclidean_distance(data.row(static_cast<std::size_t>(i)),
                                          data.row(static_cast<std::size_t>(j)));
      e(i, j) = d;
      e(j, i) = d;
    }
  }
  return e;
}

namespace {

template <typename Scalar>
Eigen::MatrixXd floyd_warshall_power(const Eigen::MatrixXd& euclid, double p, double scale) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = euclid.rows();
  const Scalar sp = static_cast<Scalar>(p);
  Mat w(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i, j) = std::pow(static_cast<Scalar>(euclid(i, j) / scale), sp);
    }
  }
  // Column-major, symmetric: update column j from column k.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar wkj = w(k, j);
      Scalar* col = w.col(j).data();
      const Scalar* colk = w.col(k).data();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar via = colk[i] + wkj;
        col[i] = via < col[i] ? via : col[i];
      }
    }
  }
  Eigen::MatrixXd out(n, n);
  const Scalar inv = Scalar(1) / sp;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = i == j ? 0.0 : scale * static_cast<double>(std::pow(w(i, j), inv));
    }
  }
  return out;
}

Eigen::MatrixXd floyd_warshall_minimax(Eigen::MatrixXd d) {
  const Eigen::Index n = d.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dkj = d(k, j);
      double* col = d.col(j).data();
      const double* colk = d.col(k).data();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double via = colk[i] > dkj ? colk[i] : dkj;
        col[i] = via < col[i] ? via : col[i];
      }
    }
  }
  return d;
}

}  // namespace

DistanceMatrix pairwise_exact(const Dataset& data, PowerParam p, std::size_t cap) {
  if (data.size() > cap) {
    throw std::invalid_argument("pairwise_exact is O(n^3): n=" + std::to_string(data.size()) +
                                " exceeds the oracle cap " + std::to_string(cap) +
                                "; use path_knn for large datasets");
  }
  Eigen::MatrixXd euclid = pairwise_euclidean(data);
  if (p.is_infinite()) return {floyd_warshall_minimax(std::move(euclid)), p};

  const double q = p.value();
  const double longest = euclid.maxCoeff();
  if (longest == 0.0) return {std::move(euclid), p};
  double shortest = longest;
  for (Eigen::Index j = 0; j < euclid.cols(); ++j) {
    for (Eigen::Index i = 0; i < euclid.rows(); ++i) {
      if (euclid(i, j) > 0.0) shortest = std::min(shortest, euclid(i, j));
    }
  }
  // Weights are (e / longest)^p in (0, 1]; fall back to extended precision
  // when the smallest would underflow a double.
  const double decades = q * std::log10(longest / shortest);
  if (decades < 280.0) return {floyd_warshall_power<double>(euclid, q, longest), p};
  if (decades < 4800.0) return {floyd_warshall_power<long double>(euclid, q, longest), p};
  throw std::range_error("p=" + p.to_string() + " exceeds the representable dynamic range");
}

SeparationStats intra_inter_stats(const DistanceMatrix& dist, const std::vector<int>& labels) {
  const auto n = static_cast<std::size_t>(dist.values.rows());
  if (labels.size() != n) throw std::invalid_argument("label count does not match matrix size");
  double eps1 = 0.0;
  double eps2 = std::numeric_limits<double>::infinity();
  bool any_inter = false;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double d = dist.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (labels[i] == labels[j]) {
        eps1 = std::max(eps1, d);
      } else {
        eps2 = std::min(eps2, d);
        any_inter = true;
      }
    }
  }
  SeparationStats s{eps1, std::nullopt};
  if (any_inter) s.eps2 = eps2;
  return s;
}

SeparationStats intra_inter_stats(const Dataset& data, PowerParam p, std::size_t cap) {
  return intra_inter_stats(pairwise_exact(data, p, cap), data.labels());
}

void write_csv(const DistanceMatrix& dist, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (Eigen::Index i = 0; i < dist.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < dist.values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(dist.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace pwspm
