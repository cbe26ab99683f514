#pragma once

// Entropic bookkeeping for measurement processes. All entropies in nats.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmtherm/measproc.hpp"

namespace qmtherm {

/// Identity and second-law slack used by the audits.
inline constexpr double kEntropyIdentityTol = 1e-8;
inline constexpr double kSecondLawSlack = 1e-8;

double shannon_entropy(const OutcomeDistribution& p);

/// −Σ λ ln λ over the strictly positive part of the spectrum.
double von_neumann_entropy(const State& rho);

/// D(ρ‖σ) = tr ρ(ln ρ − ln σ). Returns +infinity when ρ puts more than
/// tol.rank weight on the eigenspace of σ with eigenvalues <= tol.psd.
double relative_entropy(const State& rho, const HermitianMatrix& sigma, const Tolerances& tol = {});

/// S(prior) − Σ_x p(x) S(σ^x) on the chosen side (First = system with prior
/// ρ, Second = apparatus with prior ξ). Degenerate outcomes are skipped.
double glo_info_gain(const PosteriorBundle& bundle, Subsystem side);

/// Same quantity for an instrument acting on ρ directly.
double glo_info_gain(const Instrument& inst, const State& rho, const Tolerances& tol = {});

/// S(σ_1) + S(σ_2) − S(σ_12), checked against D(σ_12 ‖ σ_1 ⊗ σ_2).
/// Throws InternalInconsistency if the two disagree by more than 1e-8.
double mutual_information(const State& joint, Dims dims, const Tolerances& tol = {});

struct ThermoReport {
  std::vector<std::string> labels;
  std::vector<double> probabilities;
  std::vector<bool> degenerate;
  double prior_entropy = 0.0;
  double xi_entropy = 0.0;
  double shannon = 0.0;
  double glo_system = 0.0;
  double glo_apparatus = 0.0;
  double avg_mutual_info = 0.0;
  std::vector<double> per_outcome_mutual_info;
  double eq5_lhs = 0.0;
  double eq5_rhs = 0.0;
  double delta_S_total = 0.0;
  /// |ΔS − (lhs − rhs)|.
  double identity_residual = 0.0;
  bool second_law_pass = false;
  std::optional<double> beta;
  std::optional<double> net_cycle_work;
};

/// Full entropy ledger of one run of `proc` on `rho`. ΔS is computed from the
/// eigenvalues of the unnormalized outcome blocks p(x)σ_SA^x and of ρ ⊗ ξ,
/// independently of the entropy-balance terms; a mismatch beyond 1e-8 throws
/// InternalInconsistency.
ThermoReport second_law_audit(const MeasurementProcess& proc, const State& rho,
                              const Tolerances& tol = {}, std::optional<double> beta = {});

struct ThirdLawReport {
  bool compatible = false;
  double xi_min_eigenvalue = 0.0;
  bool premeasurement_strictly_positive = false;
  double premeasurement_min_output_eigenvalue = 0.0;
};

ThirdLawReport third_law_audit(const MeasurementProcess& proc, const Tolerances& tol = {});

struct EnergyAccount {
  double internal_energy = 0.0;
  double free_energy = 0.0;
};

EnergyAccount energy_accounting(const State& rho, const HermitianMatrix& h, double beta);

/// −ΔS/β. Positive work with ΔS < 0 would violate the second law.
double net_cycle_work(double delta_s, double beta);

double holevo_chi(const OutcomeDistribution& weights, const std::vector<State>& states);

/// Deterministic seeded panel: index k uses subseed(seed, k) and cycles
/// through Wishart, pure and full-rank states.
std::vector<State> state_panel(std::size_t dim, std::size_t count, std::uint64_t seed);

struct GloSearchResult {
  State state;
  double value = 0.0;
  std::size_t trial = 0;
  std::size_t trials = 0;
};

/// Trial 0 is 𝟙/d; odd trials are pure, even trials full rank, each drawn
/// from subseed(seed, trial). Ties go to the lowest trial index.
GloSearchResult search_negative_glo(const Instrument& inst, std::size_t trials, std::uint64_t seed,
                                    const Tolerances& tol = {});

enum class SecondLawEvidence { Certificate, Panel, Violated };

std::string_view to_string(SecondLawEvidence e);

struct TrilemmaVerdict {
  // Arm (i).
  bool law_compatible = false;
  bool third_law = false;
  SecondLawEvidence second_law = SecondLawEvidence::Violated;
  std::size_t panel_size = 0;
  double panel_worst_delta_s = 0.0;
  // Arm (ii), read as bistochasticity of E alone.
  bool premeasurement_autonomous_ok = false;
  bool composed_bistochastic = false;
  std::string arm_ii_reading;
  // Arm (iii).
  bool quasicomplete = false;
  /// Induced observable is trivial: the no-go does not apply.
  bool vacuous = false;
  std::vector<std::string> failed_arms;
};

/// Throws InternalInconsistency if all three arms hold for a nontrivial
/// induced observable.
TrilemmaVerdict trilemma_classify(const MeasurementProcess& proc, const Tolerances& tol = {},
                                  std::size_t panel_size = 50, std::uint64_t panel_seed = 0);

}  // namespace qmtherm
