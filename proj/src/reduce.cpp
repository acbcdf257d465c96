#include "posinduce/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "posinduce/container.hpp"
#include "posinduce/context.hpp"

namespace posinduce {
namespace {

// Y = C * X
RowMatrix multiply(const SparseCountMatrix& c, const RowMatrix& x) {
  RowMatrix y = RowMatrix::Zero(c.n_rows(), x.cols());
  for (std::int64_t r = 0; r < c.n_rows(); ++r) {
    const auto cols = c.row_cols(r);
    const auto vals = c.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      y.row(r).noalias() += static_cast<double>(vals[k]) * x.row(cols[k]);
    }
  }
  return y;
}

// Y = C^T * X
RowMatrix multiply_transposed(const SparseCountMatrix& c, const RowMatrix& x) {
  RowMatrix y = RowMatrix::Zero(c.n_cols(), x.cols());
  for (std::int64_t r = 0; r < c.n_rows(); ++r) {
    const auto cols = c.row_cols(r);
    const auto vals = c.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      y.row(cols[k]).noalias() += static_cast<double>(vals[k]) * x.row(r);
    }
  }
  return y;
}

}  // namespace

namespace detail {

JacobiResult jacobi_svd(Eigen::MatrixXd a) {
  const Eigen::Index cols = a.cols();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(cols, cols);
  constexpr double kEps = 1e-15;
  constexpr int kMaxSweeps = 80;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < cols; ++p) {
      for (Eigen::Index q = p + 1; q < cols; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < cols; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Eigen::VectorXd norms(cols);
  for (Eigen::Index j = 0; j < cols; ++j) norms[j] = a.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cols));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return norms[x] > norms[y];
  });

  JacobiResult out;
  out.sigma.resize(cols);
  out.u = Eigen::MatrixXd::Zero(a.rows(), cols);
  out.v.resize(cols, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.sigma[j] = norms[src];
    if (norms[src] > 0.0) out.u.col(j) = a.col(src) / norms[src];
    out.v.col(j) = v.col(src);
  }
  return out;
}

void orthonormalize(Eigen::MatrixXd& m, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      const double original = m.col(j).norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) {
          m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
        }
      }
      const double norm = m.col(j).norm();
      if (norm > 0.0 && norm > 1e-10 * original) {
        m.col(j) /= norm;
        break;
      }
      if (attempt > 16) {
        throw NumericError("orthonormalization failed to find a new direction");
      }
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
    }
  }
}

}  // namespace detail

ReducedSpace::ReducedSpace(Eigen::VectorXd singular_values, RowMatrix basis,
                           RowMatrix row_embeddings, int requested_dims,
                           int iterations)
    : singular_values_(std::move(singular_values)),
      basis_(std::move(basis)),
      row_embeddings_(std::move(row_embeddings)),
      requested_dims_(requested_dims),
      iterations_(iterations) {}

Eigen::VectorXd ReducedSpace::project(std::span<const double> v) const {
  if (static_cast<Eigen::Index>(v.size()) != basis_.rows()) {
    throw UsageError("project: vector has " + std::to_string(v.size()) +
                     " entries, space expects " + std::to_string(basis_.rows()));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis_.cols());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      out.noalias() += v[i] * basis_.row(static_cast<Eigen::Index>(i)).transpose();
    }
  }
  return out;
}

Eigen::VectorXd ReducedSpace::project(std::span<const std::int32_t> cols,
                                      std::span<const std::int64_t> values) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis_.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= basis_.rows()) {
      throw UsageError("project: column index out of range");
    }
    out.noalias() += static_cast<double>(values[k]) * basis_.row(cols[k]).transpose();
  }
  return out;
}

bool ReducedSpace::operator==(const ReducedSpace& other) const {
  return requested_dims_ == other.requested_dims_ &&
         iterations_ == other.iterations_ &&
         singular_values_ == other.singular_values_ &&
         basis_ == other.basis_ && row_embeddings_ == other.row_embeddings_;
}

void write_reduced_space(const ReducedSpace& space, const std::string& prefix,
                         ContainerWriter& out) {
  out.meta(prefix + ".dims", std::to_string(space.dims()));
  out.meta(prefix + ".requested_dims", std::to_string(space.requested_dims()));
  out.meta(prefix + ".iterations", std::to_string(space.iterations()));
  out.add_vector(prefix + ".singular_values", space.singular_values());
  out.add_matrix(prefix + ".basis", space.basis());
}

ReducedSpace read_reduced_space(const ContainerReader& in,
                                const std::string& prefix) {
  Eigen::VectorXd sigma = in.vector(prefix + ".singular_values");
  RowMatrix basis = in.matrix(prefix + ".basis");
  int requested = 0, iterations = 0;
  try {
    requested = std::stoi(in.meta(prefix + ".requested_dims"));
    iterations = std::stoi(in.meta(prefix + ".iterations"));
  } catch (const std::logic_error&) {
    throw DataError("malformed reduced-space metadata under '" + prefix + "'");
  }
  if (basis.cols() != sigma.size()) {
    throw DataError("reduced space '" + prefix + "': basis has " +
                    std::to_string(basis.cols()) + " columns for " +
                    std::to_string(sigma.size()) + " singular values");
  }
  return ReducedSpace(std::move(sigma), std::move(basis), RowMatrix(), requested,
                      iterations);
}

ReducedSpace truncated_svd(const SparseCountMatrix& matrix, int dims,
                           const SvdOptions& options) {
  const std::int64_t n = matrix.n_rows();
  const std::int64_t d = matrix.n_cols();
  const std::int64_t full = std::min(n, d);
  if (dims < 1 || dims > full) {
    throw UsageError("truncated_svd: requested " + std::to_string(dims) +
                     " dimensions for a " + std::to_string(n) + "x" +
                     std::to_string(d) + " matrix");
  }
  if (matrix.nnz() == 0) {
    throw NumericError("truncated_svd: matrix is all zeros");
  }

  // Singular values at rounding level are rank deficiency, not signal.
  const auto rank_floor = [&](double largest) {
    return largest * 1e-13 * static_cast<double>(std::max(n, d));
  };
  const Eigen::Index width = static_cast<Eigen::Index>(
      std::min<std::int64_t>(full, dims + std::max(0, options.oversample)));
  Rng rng(options.seed);

  RowMatrix omega(d, width);
  for (Eigen::Index i = 0; i < omega.rows(); ++i) {
    for (Eigen::Index j = 0; j < width; ++j) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = multiply(matrix, omega);
  detail::orthonormalize(q, rng);

  detail::JacobiResult ritz;
  Eigen::VectorXd previous;
  int iterations = 0;
  bool converged = false;
  while (!converged) {
    if (iterations == options.max_iterations) {
      throw NumericError("truncated_svd: singular values did not converge in " +
                         std::to_string(options.max_iterations) + " iterations");
    }
    ++iterations;
    const RowMatrix a = multiply_transposed(matrix, RowMatrix(q));
    ritz = detail::jacobi_svd(a);

    if (width == full) {
      // The subspace already covers the whole row or column space.
      converged = true;
    } else if (previous.size() > 0) {
      converged = true;
      const double floor = rank_floor(ritz.sigma[0]);
      for (int i = 0; i < dims; ++i) {
        const double s = ritz.sigma[i];
        if (s <= floor && previous[i] <= floor) continue;
        if (std::abs(s - previous[i]) > options.tolerance * s) {
          converged = false;
          break;
        }
      }
    }
    previous = ritz.sigma;
    if (!converged) {
      q = multiply(matrix, a);
      detail::orthonormalize(q, rng);
    }
  }

  const double rank_tol = rank_floor(ritz.sigma[0]);
  int kept = 0;
  while (kept < dims && ritz.sigma[kept] > rank_tol) ++kept;

  Eigen::VectorXd sigma = ritz.sigma.head(kept);
  RowMatrix basis = ritz.u.leftCols(kept);
  for (int j = 0; j < kept; ++j) {
    Eigen::Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0) basis.col(j) *= -1.0;
  }
  RowMatrix embeddings = multiply(matrix, basis);
  return ReducedSpace(std::move(sigma), std::move(basis), std::move(embeddings),
                      dims, iterations);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = std::min(u.size(), v.size());
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  const double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

double correlation(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = std::min(u.size(), v.size());
  if (n == 0) return 0.0;
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  std::vector<double> cu(n), cv(n);
  for (std::size_t i = 0; i < n; ++i) {
    cu[i] = u[i] - mu;
    cv[i] = v[i] - mv;
  }
  return cosine(cu, cv);
}

}  // namespace posinduce
