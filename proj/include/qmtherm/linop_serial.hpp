#pragma once

// Single-threaded reference versions of the parallel kernels in linop.hpp.
// Kept for tests and the benchmark; the library itself never calls them.

#include "qmtherm/linop.hpp"

namespace qmtherm::serial {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& m, Dims dims, Subsystem keep);
ComplexMatrix kraus_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m);
ComplexMatrix kraus_dual_sum(std::span<const ComplexMatrix> kraus, const ComplexMatrix& m);

}  // namespace qmtherm::serial
