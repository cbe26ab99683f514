#pragma once

// Seeded property sweeps behind `qmtherm verify`. Trial t draws all of its
// randomness from subseed(seed, t), so results do not depend on thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmtherm/error.hpp"
#include "qmtherm/tolerances.hpp"

namespace qmtherm {

enum class Suite { Nogo, Lemma2Identity, Lemma3, Theorem2, Davies };

std::string_view to_string(Suite s);
std::optional<Suite> parse_suite(std::string_view name);

inline constexpr std::size_t kMaxSuiteDim = 4;
inline constexpr std::size_t kMaxSuiteOutcomes = 4;
inline constexpr std::size_t kMaxSuiteTrials = 10000;

struct SuiteParams {
  Suite suite = Suite::Nogo;
  std::size_t dim = 2;
  std::size_t outcomes = 2;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
};

/// A single numeric verdict. For `upper` checks pass ⟺ value <= bound, for
/// lower checks pass ⟺ value >= bound.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;
  bool pass = false;
};

Check upper_check(std::string name, double value, double bound);
Check lower_check(std::string name, double value, double bound);

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t subseed = 0;
  std::vector<Check> checks;
  bool pass = false;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

struct SuiteReport {
  SuiteParams params;
  std::vector<TrialResult> trials;
  /// Worst value of each named check across trials, in first-seen order.
  std::vector<Check> worst;
  std::size_t failed_trials = 0;
  bool internal_inconsistency = false;
  bool pass = false;
};

/// Throws InvalidInput when parameters exceed the desk-scale caps or are
/// below 2 (dim, outcomes) / 1 (trials).
SuiteReport run_suite(const SuiteParams& params, const Tolerances& tol = {});

}  // namespace qmtherm
