#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace pwspm {

/// Leading eigenpairs of a symmetric operator, eigenvalues descending.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // n x count, orthonormal columns
  std::size_t matvecs = 0;
};

class EigenNonConvergence : public std::runtime_error {
 public:
  EigenNonConvergence(std::size_t matvecs, double worst_residual)
      : std::runtime_error("eigensolver did not converge after " + std::to_string(matvecs) +
                           " matrix-vector products (worst residual " +
                           scientific(worst_residual) + ")"),
        matvecs_(matvecs) {}
  std::size_t matvecs() const { return matvecs_; }

 private:
  std::size_t matvecs_;

  static std::string scientific(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
};

/// Largest `count` eigenpairs of a dense symmetric matrix (LAPACK dsyevr,
/// index range).
EigenPairs top_eigenpairs_dense(const Eigen::MatrixXd& m, std::size_t count);

struct IterativeOptions {
  double tol = 1e-8;               // residual bound relative to the operator norm
  std::size_t max_matvecs = 5000;
  std::uint64_t seed = 0;
  std::size_t block_size = 0;      // 0: one column per wanted eigenpair
  std::size_t basis_size = 0;      // 0: automatic
};

/// out = M * in, for a block of columns.
using BlockOperator = std::function<void(const Eigen::MatrixXd& in, Eigen::MatrixXd& out)>;

/// Block Lanczos with full reorthogonalisation and thick restarts, keeping
/// the leading Ritz vectors across restarts. Converged when every returned
/// pair satisfies |Mv - lambda v| <= tol * |M|, with |M| estimated by the
/// largest Ritz value magnitude. Throws EigenNonConvergence past max_matvecs.
EigenPairs top_eigenpairs_iterative(const BlockOperator& op, std::size_t n, std::size_t count,
                                    const IterativeOptions& options = {});

EigenPairs top_eigenpairs_iterative(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                                    std::size_t count, const IterativeOptions& options = {});

}  // namespace pwspm
