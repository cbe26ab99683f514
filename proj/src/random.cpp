#include "qmtherm/random.hpp"

#include <cmath>

#include "qmtherm/error.hpp"

namespace qmtherm {

std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Fill row-major so the draw order matches the serialized layout.
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

ComplexVector random_gaussian_vector(std::size_t dim, Rng& rng) {
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return v;
}

State random_state(std::size_t dim, Rng& rng) {
  if (dim < 1) fail(ErrorKind::InvalidInput, "random_state: dim must be >= 1");
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
  const ComplexMatrix w = g * g.adjoint();
  return State::from_matrix(w / trace(w).real());
}

State random_pure_state(std::size_t dim, Rng& rng) {
  if (dim < 1) fail(ErrorKind::InvalidInput, "random_pure_state: dim must be >= 1");
  return State::pure(random_gaussian_vector(dim, rng));
}

State random_full_rank_state(std::size_t dim, Rng& rng, const Tolerances& tol) {
  if (dim < 1) fail(ErrorKind::InvalidInput, "random_full_rank_state: dim must be >= 1");
  for (int attempt = 0; attempt < 64; ++attempt) {
    const State base = random_state(dim, rng);
    const ComplexMatrix mixed = (1.0 - kFullRankMix) * base.matrix() +
                                kFullRankMix * identity_matrix(dim) / static_cast<double>(dim);
    State s = State::from_matrix(mixed, tol);
    if (min_eigenvalue(s.hermitian()) > tol.strict) return s;
  }
  fail(ErrorKind::InvalidInput, "random_full_rank_state: strict tolerance unreachable");
}

Observable random_povm(std::size_t dim, std::size_t outcomes, Rng& rng) {
  if (dim < 1 || outcomes < 1) {
    fail(ErrorKind::InvalidInput, "random_povm: dim and outcomes must be >= 1");
  }
  std::vector<ComplexMatrix> grams;
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < outcomes; ++k) {
    const ComplexMatrix m = random_gaussian_matrix(dim, dim, rng);
    grams.push_back(m.adjoint() * m);
    total += grams.back();
  }
  const ComplexMatrix s = matrix_inverse_sqrt(HermitianMatrix::symmetrized(total), 0.0).matrix();
  std::vector<Effect> effects;
  for (const auto& g : grams) effects.push_back(Effect::from_matrix(s * g * s));
  if (outcomes == 1) {
    effects.front() = Effect(HermitianMatrix::identity(dim));
  }
  return Observable::with_default_labels(std::move(effects));
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  if (dim < 1) fail(ErrorKind::InvalidInput, "random_unitary: dim must be >= 1");
  const ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(k) *= diag / mag;
  }
  return q;
}

RandomObject random_object(RandomKind kind, std::size_t dim, std::size_t outcomes,
                           std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case RandomKind::State: return random_state(dim, rng);
    case RandomKind::PureState: return random_pure_state(dim, rng);
    case RandomKind::FullRankState: return random_full_rank_state(dim, rng);
    case RandomKind::Povm: return random_povm(dim, outcomes, rng);
    case RandomKind::Unitary: return random_unitary(dim, rng);
  }
  fail(ErrorKind::InvalidInput, "random_object: unknown kind");
}

}  // namespace qmtherm
