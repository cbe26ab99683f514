#pragma once

namespace qmtherm {

/// Numerical thresholds shared by every predicate in the library.
///
/// `psd`      eigenvalues >= -psd count as positive semidefinite (clipped to 0).
/// `strict`   strictly positive means smallest eigenvalue > strict.
/// `rank`     Choi/Gram eigenvalues above rank * largest count towards rank.
/// `equality` max-entry residual for trace preservation, unitality,
///            POVM normalization and projector algebra.
/// `p_floor`  outcome probabilities at or below this are degenerate.
struct Tolerances {
  double psd = 1e-9;
  double strict = 1e-9;
  double rank = 1e-8;
  double equality = 1e-9;
  double p_floor = 1e-12;
};

}  // namespace qmtherm
