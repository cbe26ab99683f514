#include "qmtherm/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmtherm/error.hpp"

namespace qmtherm {

namespace {

constexpr int kPuritySamples = 25;
constexpr double kPureOutputTol = 1e-8;
constexpr double kFactorizationTol = 1e-8;
constexpr std::uint64_t kPuritySampleSeed = 0x70757269747953ULL;

std::string dims_string(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Eigen-decomposition of the Kraus Gram matrix, eigenvalues descending.
struct GramSpectrum {
  RealVector values;
  ComplexMatrix vectors;
};

GramSpectrum gram_spectrum(const std::vector<ComplexMatrix>& kraus) {
  const auto n = static_cast<Eigen::Index>(kraus.size());
  ComplexMatrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = (kraus[i].adjoint() * kraus[j]).trace();
    }
  }
  const auto eig = hermitian_eig(HermitianMatrix::symmetrized(gram));
  GramSpectrum out{eig.values.reverse(), eig.vectors.rowwise().reverse()};
  return out;
}

std::size_t count_rank(const RealVector& descending, double rank_tol) {
  if (descending.size() == 0 || descending(0) <= 0.0) return 0;
  const double cut = rank_tol * descending(0);
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < descending.size(); ++k) {
    if (descending(k) > cut) ++r;
  }
  return r;
}

}  // namespace

QuantumOperation::QuantumOperation(std::size_t in_dim, std::size_t out_dim,
                                   std::vector<ComplexMatrix> kraus, const Tolerances& tol)
    : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
  if (in_dim_ < 1 || out_dim_ < 1) fail(ErrorKind::InvalidInput, "operation dimensions must be >= 1");
  if (kraus_.empty()) fail(ErrorKind::InvalidInput, "operation needs at least one Kraus operator");
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(in_dim_),
                                            static_cast<Eigen::Index>(in_dim_));
  for (const auto& k : kraus_) {
    if (static_cast<std::size_t>(k.rows()) != out_dim_ ||
        static_cast<std::size_t>(k.cols()) != in_dim_) {
      fail(ErrorKind::InvalidInput, "Kraus operator is " + dims_string(k.rows(), k.cols()) +
                                        ", expected " + dims_string(out_dim_, in_dim_));
    }
    if (!all_finite(k)) fail(ErrorKind::InvalidInput, "Kraus operator has non-finite entries");
    total += k.adjoint() * k;
  }
  const double top = max_eigenvalue(HermitianMatrix::symmetrized(total));
  if (top > 1.0 + tol.psd) {
    fail(ErrorKind::InvalidInput,
         "operation increases trace (max eigenvalue of Σ K†K is " + std::to_string(top) + ")");
  }
}

QuantumOperation QuantumOperation::identity(std::size_t dim) {
  return QuantumOperation(dim, dim, {identity_matrix(dim)});
}

QuantumOperation QuantumOperation::unitary(const ComplexMatrix& u, const Tolerances& tol) {
  if (u.rows() != u.cols() || unitarity_residual(u) > tol.equality) {
    fail(ErrorKind::InvalidInput, "matrix is not unitary");
  }
  const auto d = static_cast<std::size_t>(u.rows());
  return QuantumOperation(d, d, {u}, tol);
}

QuantumOperation QuantumOperation::compressed(double rank_tol) const {
  const auto spec = gram_spectrum(kraus_);
  const std::size_t r = count_rank(spec.values, rank_tol);
  std::vector<ComplexMatrix> out;
  if (r == 0) {
    out.push_back(ComplexMatrix::Zero(static_cast<Eigen::Index>(out_dim_),
                                      static_cast<Eigen::Index>(in_dim_)));
  }
  for (std::size_t k = 0; k < r; ++k) {
    ComplexMatrix l = ComplexMatrix::Zero(static_cast<Eigen::Index>(out_dim_),
                                          static_cast<Eigen::Index>(in_dim_));
    for (std::size_t i = 0; i < kraus_.size(); ++i) {
      l += spec.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * kraus_[i];
    }
    out.push_back(std::move(l));
  }
  // Dropping null directions can only lower Σ K†K, so skip re-validation.
  QuantumOperation result = *this;
  result.kraus_ = std::move(out);
  return result;
}

ChoiMatrix::ChoiMatrix(std::size_t in_dim, std::size_t out_dim, HermitianMatrix m)
    : in_dim_(in_dim), out_dim_(out_dim), m_(std::move(m)) {
  if (m_.dim() != in_dim_ * out_dim_) {
    fail(ErrorKind::InvalidInput, "Choi matrix dimension " + std::to_string(m_.dim()) +
                                      " does not match " + std::to_string(in_dim_) + "·" +
                                      std::to_string(out_dim_));
  }
}

ComplexMatrix apply(const QuantumOperation& op, const ComplexMatrix& m) {
  if (static_cast<std::size_t>(m.rows()) != op.in_dim() || m.rows() != m.cols()) {
    fail(ErrorKind::InvalidInput, "apply: operand is " + dims_string(m.rows(), m.cols()) +
                                      ", operation input dim " + std::to_string(op.in_dim()));
  }
  return kraus_sum(op.kraus(), m);
}

ComplexMatrix dual_apply(const QuantumOperation& op, const ComplexMatrix& m) {
  if (static_cast<std::size_t>(m.rows()) != op.out_dim() || m.rows() != m.cols()) {
    fail(ErrorKind::InvalidInput, "dual_apply: operand is " + dims_string(m.rows(), m.cols()) +
                                      ", operation output dim " + std::to_string(op.out_dim()));
  }
  return kraus_dual_sum(op.kraus(), m);
}

ChoiMatrix to_choi(const QuantumOperation& op) {
  const auto din = op.in_dim();
  const auto dout = op.out_dim();
  const auto n = static_cast<Eigen::Index>(din * dout);
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  const auto bo = static_cast<Eigen::Index>(dout);
  for (std::size_t i = 0; i < din; ++i) {
    for (std::size_t j = 0; j < din; ++j) {
      c.block(static_cast<Eigen::Index>(i) * bo, static_cast<Eigen::Index>(j) * bo, bo, bo) =
          qmtherm::apply(op, matrix_unit(din, i, j));
    }
  }
  return ChoiMatrix(din, dout, HermitianMatrix::symmetrized(c));
}

QuantumOperation kraus_from_choi(const ChoiMatrix& c, const Tolerances& tol) {
  const auto eig = hermitian_eig(c.hermitian());
  if (eig.values(0) < -tol.psd) {
    fail(ErrorKind::NotCompletelyPositive,
         "Choi matrix has eigenvalue " + std::to_string(eig.values(0)));
  }
  const auto din = static_cast<Eigen::Index>(c.in_dim());
  const auto dout = static_cast<Eigen::Index>(c.out_dim());
  const Eigen::Index n = eig.values.size();
  const double top = eig.values(n - 1);
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index k = n - 1; k >= 0 && top > 0.0; --k) {
    const double lambda = eig.values(k);
    if (lambda <= tol.rank * top) break;
    ComplexMatrix op(dout, din);
    for (Eigen::Index i = 0; i < din; ++i) {
      for (Eigen::Index o = 0; o < dout; ++o) {
        op(o, i) = std::sqrt(lambda) * eig.vectors(i * dout + o, k);
      }
    }
    kraus.push_back(std::move(op));
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(dout, din));
  return QuantumOperation(c.in_dim(), c.out_dim(), std::move(kraus), tol);
}

double choi_distance(const QuantumOperation& a, const QuantumOperation& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
    return std::numeric_limits<double>::infinity();
  }
  return max_abs(to_choi(a).matrix() - to_choi(b).matrix());
}

QuantumOperation compose(const QuantumOperation& after, const QuantumOperation& before) {
  if (after.in_dim() != before.out_dim()) {
    fail(ErrorKind::InvalidInput, "compose: output dim " + std::to_string(before.out_dim()) +
                                      " does not feed input dim " + std::to_string(after.in_dim()));
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(after.kraus().size() * before.kraus().size());
  for (const auto& a : after.kraus()) {
    for (const auto& b : before.kraus()) kraus.push_back(a * b);
  }
  return QuantumOperation(before.in_dim(), after.out_dim(), std::move(kraus));
}

QuantumOperation tensor(const QuantumOperation& a, const QuantumOperation& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus()) {
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  }
  return QuantumOperation(a.in_dim() * b.in_dim(), a.out_dim() * b.out_dim(), std::move(kraus));
}

std::size_t kraus_rank(const QuantumOperation& op, double rank_tol) {
  return count_rank(gram_spectrum(op.kraus()).values, rank_tol);
}

ChannelClassification classify_channel(const QuantumOperation& op, const Tolerances& tol) {
  ChannelClassification c;
  const ComplexMatrix id_in = identity_matrix(op.in_dim());
  const ComplexMatrix id_out = identity_matrix(op.out_dim());
  const ComplexMatrix effect = dual_apply(op, id_out);
  c.trace_residual = max_abs(effect - id_in);
  c.trace_preserving = c.trace_residual <= tol.equality;
  c.trace_nonincreasing = max_eigenvalue(HermitianMatrix::symmetrized(effect)) <= 1.0 + tol.psd;
  const ComplexMatrix image = qmtherm::apply(op, id_in);
  if (op.in_dim() == op.out_dim()) {
    c.unital_residual = max_abs(image - id_out);
    c.unital = c.unital_residual <= tol.equality;
  } else {
    c.unital_residual = std::numeric_limits<double>::infinity();
  }
  c.bistochastic = c.trace_preserving && c.unital;
  c.min_output_eigenvalue = min_eigenvalue(HermitianMatrix::symmetrized(image));
  c.strictly_positive = c.min_output_eigenvalue > tol.strict;
  c.min_kraus_count = kraus_rank(op, tol.rank);
  return c;
}

std::string_view to_string(PurityTag tag) {
  switch (tag) {
    case PurityTag::SingleKraus: return "single_kraus";
    case PurityTag::PurePrepare: return "pure_prepare";
    case PurityTag::NotPurityPreserving: return "not_purity_preserving";
  }
  return "unknown";
}

PurityClass purity_class(const QuantumOperation& op, const Tolerances& tol) {
  PurityClass pc;
  const auto spec = gram_spectrum(op.kraus());
  const std::size_t rank = count_rank(spec.values, tol.rank);
  if (spec.values.size() >= 2 && spec.values(0) > 0.0) {
    pc.margin = std::max(0.0, spec.values(1)) / spec.values(0);
  }

  if (rank <= 1) {
    pc.tag = PurityTag::SingleKraus;
    pc.kraus = op.compressed(tol.rank).kraus().front();
  } else {
    const auto image = hermitian_eig(HermitianMatrix::symmetrized(
        qmtherm::apply(op, identity_matrix(op.in_dim()))));
    const Eigen::Index n = image.values.size();
    const double top = image.values(n - 1);
    const bool rank_one_image = n == 1 || image.values(n - 2) <= tol.rank * top;
    if (top > 0.0 && rank_one_image) {
      const ComplexVector phi = image.vectors.col(n - 1);
      const ComplexMatrix effect = dual_apply(op, identity_matrix(op.out_dim()));
      const ComplexMatrix factorized = kron(effect.transpose(), phi * phi.adjoint());
      if (max_abs(to_choi(op).matrix() - factorized) <= kFactorizationTol) {
        pc.tag = PurityTag::PurePrepare;
        pc.effect = effect;
        pc.prepared = phi;
      }
    }
  }

  // Sampling cross-check: purity-preserving tags need every sampled output
  // pure; the negative tag needs at least one mixed output.
  Rng rng(kPuritySampleSeed ^ (op.in_dim() << 8) ^ op.out_dim());
  bool all_pure = true;
  for (int s = 0; s < kPuritySamples; ++s) {
    const State psi = random_pure_state(op.in_dim(), rng);
    const ComplexMatrix out = qmtherm::apply(op, psi.matrix());
    const double tr = trace(out).real();
    const auto eig = hermitian_eig(HermitianMatrix::symmetrized(out));
    const Eigen::Index n = eig.values.size();
    const double second = n >= 2 ? eig.values(n - 2) : 0.0;
    if (second > kPureOutputTol * tr) {
      all_pure = false;
      break;
    }
  }
  const bool tagged_pure = pc.tag != PurityTag::NotPurityPreserving;
  if (tagged_pure != all_pure) {
    fail(ErrorKind::AmbiguousClassification,
         std::string("purity tests disagree: structural tag ") + std::string(to_string(pc.tag)) +
             ", sampled outputs " + (all_pure ? "all pure" : "mixed") +
             " (Gram margin " + std::to_string(pc.margin) + ")");
  }
  return pc;
}

QuantumOperation random_channel(std::size_t in_dim, std::size_t out_dim, std::size_t kraus_count,
                                Rng& rng) {
  if (kraus_count < 1) fail(ErrorKind::InvalidInput, "random_channel: need >= 1 Kraus operator");
  if (kraus_count * out_dim < in_dim) {
    fail(ErrorKind::InvalidInput, "random_channel: too few Kraus operators for a channel");
  }
  std::vector<ComplexMatrix> ms;
  ComplexMatrix total = ComplexMatrix::Zero(static_cast<Eigen::Index>(in_dim),
                                            static_cast<Eigen::Index>(in_dim));
  for (std::size_t k = 0; k < kraus_count; ++k) {
    ms.push_back(random_gaussian_matrix(out_dim, in_dim, rng));
    total += ms.back().adjoint() * ms.back();
  }
  const ComplexMatrix s = matrix_inverse_sqrt(HermitianMatrix::symmetrized(total), 0.0).matrix();
  for (auto& m : ms) m = m * s;
  return QuantumOperation(in_dim, out_dim, std::move(ms));
}

}  // namespace qmtherm
