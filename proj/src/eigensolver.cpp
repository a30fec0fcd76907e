#include "pwspm/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "pwspm/random.hpp"

namespace pwspm {

EigenPairs top_eigenpairs_dense(const Eigen::MatrixXd& m, std::size_t count) {
  const auto n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  if (count < 1 || count > static_cast<std::size_t>(n)) {
    throw std::invalid_argument("requested " + std::to_string(count) + " eigenpairs of a " +
                                std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  Eigen::MatrixXd a = m;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(count));
  std::vector<lapack_int> support(2 * count);
  lapack_int found = 0;
  const lapack_int lo = n - static_cast<lapack_int>(count) + 1;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, lo, n, 0.0, &found,
                     w.data(), z.data(), n, support.data());
  if (info != 0 || found != static_cast<lapack_int>(count)) {
    throw std::runtime_error("LAPACKE_dsyevr failed (info " + std::to_string(info) + ")");
  }
  EigenPairs out;
  out.values.resize(static_cast<Eigen::Index>(count));
  out.vectors.resize(n, static_cast<Eigen::Index>(count));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(count); ++c) {
    const Eigen::Index src = static_cast<Eigen::Index>(count) - 1 - c;
    out.values(c) = w(src);
    out.vectors.col(c) = z.col(src);
  }
  return out;
}

namespace {

// Orthogonalises the columns of `x` against `basis` (two classical passes) and
// against each other. Columns that collapse are replaced by random
// directions. Returns false when the space is exhausted.
bool orthonormalize(const Eigen::MatrixXd& basis, Eigen::MatrixXd& x, Rng& rng) {
  const Eigen::Index n = x.rows();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::VectorXd v = x.col(c);
      const double before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
        if (c > 0) v -= x.leftCols(c) * (x.leftCols(c).transpose() * v);
      }
      const double after = v.norm();
      if (after > 1e-10 * std::max(before, 1e-300)) {
        x.col(c) = v / after;
        break;
      }
      if (basis.cols() + c >= n) return false;
      for (Eigen::Index i = 0; i < n; ++i) x(i, c) = normal(rng, 0.0, 1.0);
      if (attempt == 3) return false;
    }
  }
  return true;
}

}  // namespace

EigenPairs top_eigenpairs_iterative(const BlockOperator& op, std::size_t n, std::size_t count,
                                    const IterativeOptions& options) {
  if (count < 1 || count > n) {
    throw std::invalid_argument("requested " + std::to_string(count) + " eigenpairs of an operator of size " +
                                std::to_string(n));
  }
  const auto N = static_cast<Eigen::Index>(n);
  const auto nev = static_cast<Eigen::Index>(count);
  const Eigen::Index block = static_cast<Eigen::Index>(options.block_size ? options.block_size : count);
  Eigen::Index max_basis = options.basis_size
                               ? static_cast<Eigen::Index>(options.basis_size)
                               : std::max<Eigen::Index>(nev + 2 * block + 20, 3 * nev);
  max_basis = std::min(max_basis, N);
  max_basis = std::max(max_basis, std::min(N, nev + block));
  const Eigen::Index keep = std::min(max_basis - block, nev + (max_basis - nev) / 2);

  Rng rng = make_rng(options.seed);
  Eigen::MatrixXd basis(N, 0);
  Eigen::MatrixXd image(N, 0);
  Eigen::MatrixXd pending(N, std::min(block, N));
  for (Eigen::Index j = 0; j < pending.cols(); ++j) {
    for (Eigen::Index i = 0; i < N; ++i) pending(i, j) = normal(rng, 0.0, 1.0);
  }
  orthonormalize(basis, pending, rng);

  std::size_t matvecs = 0;
  double worst = 0.0;
  bool exhausted = false;
  while (true) {
    // Only whole blocks are appended: a truncated block would drop part of
    // the Krylov residual and stall the restarted iteration.
    while (basis.cols() + pending.cols() <= max_basis && !exhausted) {
      const Eigen::Index take = pending.cols();
      Eigen::MatrixXd x = pending;
      Eigen::MatrixXd z(N, take);
      op(x, z);
      matvecs += static_cast<std::size_t>(take);

      const Eigen::Index old = basis.cols();
      basis.conservativeResize(N, old + take);
      image.conservativeResize(N, old + take);
      basis.rightCols(take) = x;
      image.rightCols(take) = z;

      if (basis.cols() >= N) {
        exhausted = true;
        break;
      }
      pending = z.leftCols(std::min(take, N - basis.cols()));
      if (!orthonormalize(basis, pending, rng)) exhausted = true;
    }

    Eigen::MatrixXd h = basis.transpose() * image;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    // Ascending order from Eigen; reverse to descending.
    const Eigen::Index m = h.rows();
    Eigen::MatrixXd s = small.eigenvectors().rowwise().reverse();
    Eigen::VectorXd theta = small.eigenvalues().reverse();

    const Eigen::MatrixXd ritz = basis * s.leftCols(nev);
    const Eigen::MatrixXd ritz_image = image * s.leftCols(nev);
    const double norm_est = std::max(std::abs(theta(0)), std::abs(theta(m - 1)));
    worst = 0.0;
    for (Eigen::Index c = 0; c < nev; ++c) {
      worst = std::max(worst, (ritz_image.col(c) - theta(c) * ritz.col(c)).norm());
    }
    const double bound = options.tol * std::max(norm_est, 1e-300);
    if (worst <= bound || exhausted) {
      EigenPairs out;
      out.values = theta.head(nev);
      out.vectors = ritz;
      out.matvecs = matvecs;
      if (worst > bound) throw EigenNonConvergence(matvecs, worst);
      return out;
    }
    if (matvecs >= options.max_matvecs) throw EigenNonConvergence(matvecs, worst);

    const Eigen::Index kept = std::min(keep, m);
    basis = (basis * s.leftCols(kept)).eval();
    image = (image * s.leftCols(kept)).eval();
  }
}

EigenPairs top_eigenpairs_iterative(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                                    std::size_t count, const IterativeOptions& options) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  BlockOperator op = [&m](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = m * in; };
  return top_eigenpairs_iterative(op, static_cast<std::size_t>(m.rows()), count, options);
}

}  // namespace pwspm
