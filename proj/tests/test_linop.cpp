#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmtherm/error.hpp"
#include "qmtherm/linop.hpp"
#include "qmtherm/random.hpp"
#include "support.hpp"

namespace qmtherm {
namespace {

using testing::diag2;
using testing::max_entry;
using testing::ref_kron;
using testing::ref_partial_trace;

ComplexMatrix random_hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = random_gaussian_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected qmtherm::Error";
  return ErrorKind::InternalInconsistency;
}

TEST(HermitianMatrix, RejectsNonHermitianAndNonFinite) {
  ComplexMatrix m = diag2(1, 2);
  m(0, 1) = 1e-6;
  EXPECT_EQ(kind_of([&] { HermitianMatrix h(m); }), ErrorKind::InvalidInput);
  ComplexMatrix n = diag2(1, std::nan(""));
  EXPECT_EQ(kind_of([&] { HermitianMatrix h(n); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { HermitianMatrix h(ComplexMatrix::Zero(2, 3)); }), ErrorKind::InvalidInput);
}

TEST(HermitianMatrix, AcceptsResidualAtConstructionBound) {
  ComplexMatrix m = diag2(1, 2);
  m(0, 1) = 5e-13;
  EXPECT_NO_THROW(HermitianMatrix h(m));
}

TEST(HermitianEig, IdentityAndDiagonal) {
  const auto id = hermitian_eig(HermitianMatrix::identity(2));
  EXPECT_DOUBLE_EQ(id.values(0), 1.0);
  EXPECT_DOUBLE_EQ(id.values(1), 1.0);
  const auto d = hermitian_eig(HermitianMatrix(diag2(3, -2)));
  EXPECT_NEAR(d.values(0), -2.0, 1e-15);
  EXPECT_NEAR(d.values(1), 3.0, 1e-15);
}

TEST(HermitianEig, ReconstructionAndUnitarityOnSeededMatrices) {
  for (std::uint64_t seed : {7u, 8u, 9u, 10u}) {
    for (std::size_t d : {1u, 2u, 4u, 7u}) {
      Rng rng(seed);
      const ComplexMatrix m = random_hermitian(d, rng);
      const auto eig = hermitian_eig(HermitianMatrix(m));
      for (Eigen::Index k = 1; k < eig.values.size(); ++k) EXPECT_LE(eig.values(k - 1), eig.values(k));
      const ComplexMatrix rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
      EXPECT_LE(max_entry(rebuilt - m), 1e-10 * static_cast<double>(d));
      EXPECT_LE(max_entry(eig.vectors.adjoint() * eig.vectors - ComplexMatrix::Identity(eig.vectors.rows(), eig.vectors.cols())), 1e-10);
    }
  }
}

TEST(MatrixSqrt, DiagonalIdentityAndFixture) {
  EXPECT_LE(max_entry(matrix_sqrt(HermitianMatrix(diag2(4, 9)), 1e-9).matrix() - diag2(2, 3)), 1e-14);
  EXPECT_LE(max_entry(matrix_sqrt(HermitianMatrix::identity(3), 1e-9).matrix() - identity_matrix(3)), 1e-14);
  EXPECT_LE(max_entry(matrix_sqrt(HermitianMatrix(diag2(0.7, 0.3)), 1e-9).matrix() -
                      diag2(std::sqrt(0.7), std::sqrt(0.3))),
            1e-15);
}

TEST(MatrixSqrt, ClipsWithinToleranceAndRejectsBeyond) {
  const auto r = matrix_sqrt(HermitianMatrix(diag2(1, -5e-10)), 1e-9);
  EXPECT_LE(max_entry(r.matrix() - diag2(1, 0)), 1e-15);
  EXPECT_EQ(kind_of([] { matrix_sqrt(HermitianMatrix(diag2(1, -1e-6)), 1e-9); }),
            ErrorKind::NotPositiveSemidefinite);
}

TEST(MatrixSqrt, SquaresBackAndMatchesGeneralSqrtOnRandomPsd) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const ComplexMatrix g = random_gaussian_matrix(3, 3, rng);
    const ComplexMatrix psd = g * g.adjoint();
    const ComplexMatrix r = matrix_sqrt(HermitianMatrix::symmetrized(psd), 1e-9).matrix();
    EXPECT_LE(max_entry(r * r - psd), 1e-9);
    EXPECT_LE(max_entry(r - psd.sqrt()), 1e-8);
    EXPECT_GE(min_eigenvalue(HermitianMatrix::symmetrized(r)), -1e-12);
  }
}

TEST(MatrixLog, IdentityDiagonalAndProjector) {
  EXPECT_LE(max_entry(matrix_log_on_support(HermitianMatrix::identity(3), 1e-9).matrix()), 1e-15);
  EXPECT_LE(max_entry(matrix_log_on_support(HermitianMatrix(diag2(std::exp(1.0), 1)), 1e-9).matrix() - diag2(1, 0)),
            1e-15);
  EXPECT_LE(max_entry(matrix_log_on_support(HermitianMatrix(diag2(1, 0)), 1e-9).matrix()), 1e-15);
  EXPECT_EQ(kind_of([] { matrix_log_on_support(HermitianMatrix(diag2(1, -1e-3)), 1e-9); }),
            ErrorKind::NotPositiveSemidefinite);
}

TEST(MatrixLog, MatchesGeneralLogOnFullRank) {
  Rng rng(31);
  const ComplexMatrix g = random_gaussian_matrix(3, 3, rng);
  const ComplexMatrix pd = g * g.adjoint() + 0.5 * ComplexMatrix::Identity(3, 3);
  EXPECT_LE(max_entry(matrix_log_on_support(HermitianMatrix::symmetrized(pd), 1e-9).matrix() - pd.log()), 1e-10);
}

TEST(MinEigenvalue, Examples) {
  EXPECT_DOUBLE_EQ(min_eigenvalue(HermitianMatrix::identity(3)), 1.0);
  EXPECT_NEAR(min_eigenvalue(HermitianMatrix(diag2(1, 0))), 0.0, 1e-16);
  EXPECT_NEAR(min_eigenvalue(HermitianMatrix(diag2(0.7, 0.3))), 0.3, 1e-15);
}

TEST(Kron, Examples) {
  EXPECT_EQ(kron(identity_matrix(2), identity_matrix(2)), identity_matrix(4));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1.0, 3.0, 2.0, 6.0;
  EXPECT_EQ(kron(diag2(1, 2), diag2(1, 3)), expected);
}

TEST(Kron, TraceFactorizesAndMatchesReference) {
  Rng rng(11);
  const ComplexMatrix a = random_gaussian_matrix(3, 3, rng);
  const ComplexMatrix b = random_gaussian_matrix(3, 3, rng);
  const ComplexMatrix ab = kron(a, b);
  EXPECT_LE(std::abs(ab.trace() - a.trace() * b.trace()), 1e-12);
  EXPECT_EQ(ab, ref_kron(a, b));
  const ComplexMatrix r = random_gaussian_matrix(2, 3, rng);
  EXPECT_EQ(kron(r, a), ref_kron(r, a));
}

TEST(Kron, Associative) {
  Rng rng(12);
  const ComplexMatrix a = random_gaussian_matrix(2, 2, rng);
  const ComplexMatrix b = random_gaussian_matrix(3, 2, rng);
  const ComplexMatrix c = random_gaussian_matrix(2, 3, rng);
  EXPECT_LE(max_entry(kron(kron(a, b), c) - kron(a, kron(b, c))), 1e-15);
}

TEST(PartialTrace, ProductIdentityAndEntangled) {
  Rng rng(13);
  const State rho = random_state(2, rng);
  const State xi = random_state(3, rng);
  const ComplexMatrix joint = kron(rho.matrix(), xi.matrix());
  EXPECT_LE(max_entry(partial_trace(joint, {2, 3}, Subsystem::First) - rho.matrix()), 1e-12);
  EXPECT_LE(max_entry(partial_trace(joint, {2, 3}, Subsystem::Second) - xi.matrix()), 1e-12);

  EXPECT_LE(max_entry(partial_trace(identity_matrix(6), {2, 3}, Subsystem::First) - 3.0 * identity_matrix(2)), 0.0);

  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix phi = bell * bell.adjoint();
  EXPECT_LE(max_entry(partial_trace(phi, {2, 2}, Subsystem::First) - identity_matrix(2) / 2.0), 1e-15);
}

TEST(PartialTrace, TracePreservingLinearAndMatchesReference) {
  Rng rng(14);
  for (Dims dims : {Dims{2, 3}, Dims{3, 2}, Dims{1, 4}, Dims{4, 4}}) {
    const auto n = dims.total();
    const ComplexMatrix a = random_gaussian_matrix(n, n, rng);
    const ComplexMatrix b = random_gaussian_matrix(n, n, rng);
    for (Subsystem keep : {Subsystem::First, Subsystem::Second}) {
      const ComplexMatrix ta = partial_trace(a, dims, keep);
      EXPECT_LE(std::abs(ta.trace() - a.trace()), 1e-12);
      EXPECT_LE(max_entry(ta - ref_partial_trace(a, dims.first, dims.second, keep == Subsystem::First)), 1e-12);
      const Complex s(0.3, -1.2);
      EXPECT_LE(max_entry(partial_trace(a + s * b, dims, keep) - (ta + s * partial_trace(b, dims, keep))), 1e-12);
    }
  }
}

TEST(PartialTrace, DimensionMismatchIsInvalidInput) {
  EXPECT_EQ(kind_of([] { partial_trace(identity_matrix(5), {2, 3}, Subsystem::First); }), ErrorKind::InvalidInput);
}

TEST(KrausSums, MatchReferenceAndRejectMismatch) {
  Rng rng(15);
  std::vector<ComplexMatrix> ks;
  for (int k = 0; k < 3; ++k) ks.push_back(random_gaussian_matrix(2, 3, rng));
  const ComplexMatrix m = random_gaussian_matrix(3, 3, rng);
  const ComplexMatrix w = random_gaussian_matrix(2, 2, rng);
  EXPECT_LE(max_entry(kraus_sum(ks, m) - testing::ref_apply(ks, m)), 1e-12);
  EXPECT_LE(max_entry(kraus_dual_sum(ks, w) - testing::ref_dual(ks, w)), 1e-12);
  EXPECT_EQ(kind_of([&] { kraus_sum(ks, w); }), ErrorKind::InvalidInput);
}

TEST(Helpers, UnitsTraceAndUnitarity) {
  const ComplexMatrix e = matrix_unit(3, 1, 2);
  EXPECT_EQ(e(1, 2), Complex(1.0, 0.0));
  EXPECT_DOUBLE_EQ(max_abs(e), 1.0);
  EXPECT_EQ(trace(identity_matrix(4)), Complex(4.0, 0.0));
  EXPECT_EQ(basis_vector(3, 2)(2), Complex(1.0, 0.0));
  EXPECT_LE(unitarity_residual(testing::pauli_x()), 0.0);
  EXPECT_GT(unitarity_residual(diag2(1, 0.5)), 0.5);
}

}  // namespace
}  // namespace qmtherm
