#pragma once

// Dense complex linear algebra used by every other module: Hermitian spectral
// calculus, tensor products and partial traces. The data-parallel kernels
// (kron, partial_trace, kraus_sum) have OpenMP implementations here and plain
// serial reference implementations in linop_serial.hpp.

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace qmtherm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Hermiticity residual accepted by the strict HermitianMatrix constructor.
inline constexpr double kHermitianResidual = 1e-12;

/// Tensor factor selector for bipartite operators on H_first ⊗ H_second.
enum class Subsystem { First, Second };

struct Dims {
  std::size_t first = 1;
  std::size_t second = 1;

  std::size_t total() const { return first * second; }
};

/// Square complex matrix equal to its adjoint.
class HermitianMatrix {
 public:
  /// Rejects non-square, non-finite or non-Hermitian (> 1e-12) input.
  explicit HermitianMatrix(ComplexMatrix m);

  /// Returns (m + m†)/2. Used at module boundaries to stop Hermiticity drift;
  /// input that is far from Hermitian is still rejected.
  static HermitianMatrix symmetrized(const ComplexMatrix& m);

  static HermitianMatrix identity(std::size_t dim);
  static HermitianMatrix zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix m, Trusted) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

/// Eigenvalues ascending; eigenvectors are the columns of a unitary matrix.
struct SpectralDecomposition {
  RealVector values;
  ComplexMatrix vectors;
};

SpectralDecomposition hermitian_eig(const HermitianMatrix& m);

/// Applies a real function to the spectrum: V f(Λ) V†, hermitized.
template <typename F>
HermitianMatrix spectral_apply(const SpectralDecomposition& eig, F&& f) {
  ComplexMatrix scaled = eig.vectors;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    scaled.col(k) *= f(eig.values(k));
  }
  return HermitianMatrix::symmetrized(scaled * eig.vectors.adjoint());
}

/// Positive square root. Eigenvalues in [-tol, 0) are clipped to zero;
/// anything below -tol throws NotPositiveSemidefinite.
HermitianMatrix matrix_sqrt(const HermitianMatrix& m, double tol);

/// Inverse square root of a strictly positive matrix (min eigenvalue > tol).
HermitianMatrix matrix_inverse_sqrt(const HermitianMatrix& m, double tol);

/// Natural log restricted to the support: eigenvalues <= tol map to 0.
HermitianMatrix matrix_log_on_support(const HermitianMatrix& m, double tol);

double min_eigenvalue(const HermitianMatrix& m);
double max_eigenvalue(const HermitianMatrix& m);

/// (a ⊗ b)(i·rb + k, j·cb + l) = a(i,j)·b(k,l)
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out the factor not named by `keep`.
ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep);

/// Σ_k K_k m K_k†. Summation order is fixed, so the result does not depend
/// on the number of OpenMP threads.
ComplexMatrix kraus_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m);

/// Σ_k K_k† m K_k.
ComplexMatrix kraus_dual_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m);

// Small helpers.
double max_abs(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);
ComplexMatrix identity_matrix(std::size_t dim);
ComplexVector basis_vector(std::size_t dim, std::size_t index);
/// |i⟩⟨j| in dimension dim.
ComplexMatrix matrix_unit(std::size_t dim, std::size_t i, std::size_t j);
/// ‖U†U − 𝟙‖_max.
double unitarity_residual(const ComplexMatrix& u);
bool all_finite(const ComplexMatrix& m);

}  // namespace qmtherm
