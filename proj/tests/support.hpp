#pragma once

// Fixtures and independent reference computations shared by the test
// binaries. Nothing here calls the library kernels it is used to check.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmtherm/instruments.hpp"
#include "qmtherm/qobjects.hpp"

namespace qmtherm::testing {

inline ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

/// E0 = diag(0.7, 0.3), E1 = diag(0.3, 0.7).
inline Observable fixture_observable() {
  return Observable::with_default_labels({Effect::from_matrix(diag2(0.7, 0.3)), Effect::from_matrix(diag2(0.3, 0.7))});
}

/// Qubit computational-basis projectors.
inline Observable z_projectors() {
  return Observable::with_default_labels({Effect::from_matrix(diag2(1, 0)), Effect::from_matrix(diag2(0, 1))});
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline ComplexMatrix ket_bra(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

inline ComplexVector unit(std::size_t dim, std::size_t k) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

inline double max_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline ComplexMatrix ref_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// tr_B via Σ_k (𝟙 ⊗ ⟨k|) M (𝟙 ⊗ |k⟩) when keep_first, otherwise tr_A.
inline ComplexMatrix ref_partial_trace(const ComplexMatrix& m, std::size_t da, std::size_t db, bool keep_first) {
  const std::size_t kept = keep_first ? da : db;
  const std::size_t gone = keep_first ? db : da;
  const ComplexMatrix id = ComplexMatrix::Identity(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(kept));
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(kept));
  for (std::size_t k = 0; k < gone; ++k) {
    const ComplexMatrix e = unit(gone, k);
    const ComplexMatrix slice = keep_first ? ref_kron(id, e) : ref_kron(e, id);
    out += slice.adjoint() * m * slice;
  }
  return out;
}

inline ComplexMatrix ref_apply(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * m * k.adjoint();
  return out;
}

inline ComplexMatrix ref_dual(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) out += k.adjoint() * m * k;
  return out;
}

/// Eigenvalues from the general (non-Hermitian) complex solver.
inline std::vector<double> ref_eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
  std::vector<double> v;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) v.push_back(es.eigenvalues()(k).real());
  return v;
}

inline double ref_entropy(const ComplexMatrix& rho) {
  double s = 0.0;
  for (double l : ref_eigenvalues(rho)) {
    if (l > 1e-300) s -= l * std::log(l);
  }
  return s;
}

inline double ref_shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

/// max over matrix units |i⟩⟨j| of ‖a(·) − b(·)‖_max, using ref_apply.
inline double action_distance(const QuantumOperation& a, const QuantumOperation& b) {
  double worst = 0.0;
  const std::size_t d = a.in_dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const ComplexMatrix e = ket_bra(unit(d, i), unit(d, j));
      worst = std::max(worst, max_entry(ref_apply(a.kraus(), e) - ref_apply(b.kraus(), e)));
    }
  }
  return worst;
}

inline double instrument_action_distance(const Instrument& a, const Instrument& b) {
  double worst = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) worst = std::max(worst, action_distance(a.operation(x), b.operation(x)));
  return worst;
}

}  // namespace qmtherm::testing
