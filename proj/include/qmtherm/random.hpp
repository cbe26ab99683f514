#pragma once

// Seeded instance generators. Every generator is a pure function of its
// arguments and the Rng state; sweeps derive one Rng per trial from
// subseed(seed, trial) so results do not depend on evaluation order.

#include <cstdint>
#include <random>
#include <variant>

#include "qmtherm/qobjects.hpp"

namespace qmtherm {

/// splitmix64 finalizer over (seed, index).
std::uint64_t subseed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Raw 64-bit draw, used to derive nested seeds.
  std::uint64_t bits() { return engine_(); }
  /// Standard complex Gaussian (real and imaginary parts N(0, 1/2)).
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Mixing weight used by random_full_rank_state.
inline constexpr double kFullRankMix = 0.05;

ComplexMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
ComplexVector random_gaussian_vector(std::size_t dim, Rng& rng);

/// G G† / tr for a square complex Gaussian G.
State random_state(std::size_t dim, Rng& rng);
State random_pure_state(std::size_t dim, Rng& rng);
/// (1 − ε)·random_state + ε·𝟙/d, resampled until min eigenvalue > tol.strict.
State random_full_rank_state(std::size_t dim, Rng& rng, const Tolerances& tol = {});
/// Effects S^{-1/2} M_i†M_i S^{-1/2} with S = Σ M_i†M_i.
Observable random_povm(std::size_t dim, std::size_t outcomes, Rng& rng);
/// QR of a complex Gaussian matrix with the phases of diag(R) absorbed.
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);

enum class RandomKind { State, PureState, FullRankState, Povm, Unitary };

using RandomObject = std::variant<State, Observable, ComplexMatrix>;

RandomObject random_object(RandomKind kind, std::size_t dim, std::size_t outcomes,
                           std::uint64_t seed);

}  // namespace qmtherm
