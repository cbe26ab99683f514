#include "qmtherm/linop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qmtherm/error.hpp"

namespace qmtherm {

namespace {

// Below this many scalar multiply-adds the OpenMP team costs more than it saves.
constexpr std::size_t kParallelThreshold = 1u << 14;

// Loose sanity bound for symmetrized(): anything further from Hermitian than
// this is a caller bug, not rounding drift.
constexpr double kSymmetrizeSanity = 1e-6;

double hermiticity_residual(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

}  // namespace

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    fail(ErrorKind::InvalidInput, "Hermitian matrix must be square and non-empty, got " +
                                      std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  }
  if (!all_finite(m_)) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");
  const double residual = hermiticity_residual(m_);
  if (residual > kHermitianResidual) {
    fail(ErrorKind::InvalidInput,
         "matrix is not Hermitian (residual " + std::to_string(residual) + ")");
  }
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail(ErrorKind::InvalidInput, "cannot symmetrize a non-square matrix");
  }
  if (!all_finite(m)) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");
  const double residual = hermiticity_residual(m);
  if (residual > kSymmetrizeSanity * std::max(1.0, max_abs(m))) {
    fail(ErrorKind::InvalidInput,
         "matrix is far from Hermitian (residual " + std::to_string(residual) + ")");
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  return HermitianMatrix(std::move(h), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  return HermitianMatrix(identity_matrix(dim), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return HermitianMatrix(ComplexMatrix::Zero(n, n), Trusted{});
}

SpectralDecomposition hermitian_eig(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::InvalidInput, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix matrix_sqrt(const HermitianMatrix& m, double tol) {
  const auto eig = hermitian_eig(m);
  if (eig.values(0) < -tol) {
    fail(ErrorKind::NotPositiveSemidefinite,
         "matrix_sqrt: eigenvalue " + std::to_string(eig.values(0)) + " below -tol");
  }
  return spectral_apply(eig, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
}

HermitianMatrix matrix_inverse_sqrt(const HermitianMatrix& m, double tol) {
  const auto eig = hermitian_eig(m);
  if (eig.values(0) <= tol) {
    fail(ErrorKind::NotPositiveSemidefinite,
         "matrix_inverse_sqrt: matrix is not strictly positive (min eigenvalue " +
             std::to_string(eig.values(0)) + ")");
  }
  return spectral_apply(eig, [](double v) { return 1.0 / std::sqrt(v); });
}

HermitianMatrix matrix_log_on_support(const HermitianMatrix& m, double tol) {
  const auto eig = hermitian_eig(m);
  if (eig.values(0) < -tol) {
    fail(ErrorKind::NotPositiveSemidefinite,
         "matrix_log_on_support: eigenvalue " + std::to_string(eig.values(0)) + " below -tol");
  }
  return spectral_apply(eig, [tol](double v) { return v > tol ? std::log(v) : 0.0; });
}

double min_eigenvalue(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  ComplexMatrix out(ra * rb, ca * cb);
  const std::size_t work = static_cast<std::size_t>(out.size());
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (Eigen::Index j = 0; j < ca; ++j) {
    for (Eigen::Index i = 0; i < ra; ++i) {
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep) {
  const auto da = static_cast<Eigen::Index>(dims.first);
  const auto db = static_cast<Eigen::Index>(dims.second);
  if (da < 1 || db < 1 || m.rows() != da * db || m.cols() != da * db) {
    fail(ErrorKind::InvalidInput, "partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()) + ", expected " +
                                      std::to_string(da * db) + " square");
  }
  const std::size_t work = static_cast<std::size_t>(m.rows());
  if (keep == Subsystem::First) {
    ComplexMatrix out(da, da);
#pragma omp parallel for collapse(2) schedule(static) if (work * work > kParallelThreshold)
    for (Eigen::Index j = 0; j < da; ++j) {
      for (Eigen::Index i = 0; i < da; ++i) {
        out(i, j) = m.block(i * db, j * db, db, db).trace();
      }
    }
    return out;
  }
  ComplexMatrix out(db, db);
#pragma omp parallel for collapse(2) schedule(static) if (work * work > kParallelThreshold)
  for (Eigen::Index j = 0; j < db; ++j) {
    for (Eigen::Index i = 0; i < db; ++i) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index k = 0; k < da; ++k) acc += m(k * db + i, k * db + j);
      out(i, j) = acc;
    }
  }
  return out;
}

namespace {

// out(i,j) = Σ_k left_k.row(i) · right_k.col(j), k in fixed order.
ComplexMatrix ordered_contract(std::span<const ComplexMatrix> left,
                               std::span<const ComplexMatrix> right, Eigen::Index rows,
                               Eigen::Index cols) {
  ComplexMatrix out(rows, cols);
  const std::size_t inner = left.empty() ? 0 : static_cast<std::size_t>(left.front().cols());
  const std::size_t work = static_cast<std::size_t>(rows * cols) * inner * left.size();
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      Complex acc{0.0, 0.0};
      for (std::size_t k = 0; k < left.size(); ++k) {
        acc += left[k].row(i).transpose().cwiseProduct(right[k].col(j)).sum();
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace

ComplexMatrix kraus_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m) {
  if (kraus.empty()) fail(ErrorKind::InvalidInput, "kraus_sum: empty Kraus list");
  const Eigen::Index rows = kraus.front().rows();
  const Eigen::Index cols = kraus.front().cols();
  if (m.rows() != cols || m.cols() != cols) {
    fail(ErrorKind::InvalidInput, "kraus_sum: operand dimension mismatch");
  }
  const auto n = static_cast<std::ptrdiff_t>(kraus.size());
  if (static_cast<std::size_t>(n * rows * rows * cols) <= kParallelThreshold) {
    ComplexMatrix out = ComplexMatrix::Zero(rows, rows);
    for (const auto& k : kraus) out.noalias() += k * m * k.adjoint();
    return out;
  }
  std::vector<ComplexMatrix> right(kraus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    right[k] = m * kraus[k].adjoint();
  }
  return ordered_contract(kraus, right, rows, rows);
}

ComplexMatrix kraus_dual_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m) {
  if (kraus.empty()) fail(ErrorKind::InvalidInput, "kraus_dual_sum: empty Kraus list");
  const Eigen::Index rows = kraus.front().rows();
  const Eigen::Index cols = kraus.front().cols();
  if (m.rows() != rows || m.cols() != rows) {
    fail(ErrorKind::InvalidInput, "kraus_dual_sum: operand dimension mismatch");
  }
  const auto n = static_cast<std::ptrdiff_t>(kraus.size());
  std::vector<ComplexMatrix> left(kraus.size());
  std::vector<ComplexMatrix> right(kraus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    left[k] = kraus[k].adjoint();
    right[k] = m * kraus[k];
  }
  return ordered_contract(left, right, cols, cols);
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Complex trace(const ComplexMatrix& m) { return m.trace(); }

ComplexMatrix identity_matrix(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(n, n);
}

ComplexVector basis_vector(std::size_t dim, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

ComplexMatrix matrix_unit(std::size_t dim, std::size_t i, std::size_t j) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return e;
}

double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

}  // namespace qmtherm
