#include "qmtherm/linop_serial.hpp"

#include "qmtherm/error.hpp"

namespace qmtherm::serial {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  ComplexMatrix out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index k = 0; k < rb; ++k) {
      for (Eigen::Index j = 0; j < ca; ++j) {
        for (Eigen::Index l = 0; l < cb; ++l) {
          out(i * rb + k, j * cb + l) = a(i, j) * b(k, l);
        }
      }
    }
  }
  return out;
}

// Walks every entry of m once and drops it into the reduced matrix when the
// traced-out indices agree.
ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep) {
  const auto da = static_cast<Eigen::Index>(dims.first);
  const auto db = static_cast<Eigen::Index>(dims.second);
  if (da < 1 || db < 1 || m.rows() != da * db || m.cols() != da * db) {
    fail(ErrorKind::InvalidInput, "serial::partial_trace: dimension mismatch");
  }
  const Eigen::Index kept = keep == Subsystem::First ? da : db;
  ComplexMatrix out = ComplexMatrix::Zero(kept, kept);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::Index ra = r / db, rb = r % db;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Eigen::Index ca = c / db, cb = c % db;
      if (keep == Subsystem::First) {
        if (rb == cb) out(ra, ca) += m(r, c);
      } else {
        if (ra == ca) out(rb, cb) += m(r, c);
      }
    }
  }
  return out;
}

ComplexMatrix kraus_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m) {
  if (kraus.empty()) fail(ErrorKind::InvalidInput, "serial::kraus_sum: empty Kraus list");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) {
    if (k.cols() != m.rows() || m.rows() != m.cols()) {
      fail(ErrorKind::InvalidInput, "serial::kraus_sum: dimension mismatch");
    }
    out += k * m * k.adjoint();
  }
  return out;
}

ComplexMatrix kraus_dual_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m) {
  if (kraus.empty()) fail(ErrorKind::InvalidInput, "serial::kraus_dual_sum: empty Kraus list");
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) {
    if (k.rows() != m.rows() || m.rows() != m.cols()) {
      fail(ErrorKind::InvalidInput, "serial::kraus_dual_sum: dimension mismatch");
    }
    out += k.adjoint() * m * k;
  }
  return out;
}

}  // namespace qmtherm::serial
