#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stplogic/network.hpp"
#include "stplogic/types.hpp"

namespace stplogic {

/// Per-node marginal distributions; the represented joint distribution is
/// always their Kronecker product.
class FactorState {
 public:
  explicit FactorState(std::vector<ProbabilityVector> factors);

  /// Factor point masses matching the decoded joint point mass.
  static FactorState point_mass(const std::vector<std::size_t>& alphabets,
                                std::size_t joint_index);

  std::size_t size() const { return factors_.size(); }
  const ProbabilityVector& factor(std::size_t pos) const { return factors_[pos]; }
  const std::vector<ProbabilityVector>& factors() const { return factors_; }

  std::vector<double> joint() const;
  std::size_t joint_dim() const;

 private:
  std::vector<ProbabilityVector> factors_;
};

enum class EvolutionMode { deterministic, independent, conditional, monte_carlo };

struct StochasticTrajectory {
  EvolutionMode mode = EvolutionMode::conditional;
  std::vector<ProbabilityVector> joints;                // index t = 0..T
  std::vector<std::vector<ProbabilityVector>> factors;  // independent mode only
  std::optional<std::size_t> stationary_at;
  bool renormalized = false;
};

struct DeterministicTrajectory {
  std::vector<std::size_t> states;  // 1-based state indices; ends at the first revisit
  std::optional<std::size_t> transient;
  std::optional<std::size_t> cycle_length;
};

struct SimulationOptions {
  std::size_t t_max = 1000;
  double stationary_tol = 1e-9;
  std::size_t stationary_window = 5;
  bool stop_on_stationary = true;
};

std::size_t step_deterministic(const LogicalMatrix& m, std::size_t state);

DeterministicTrajectory simulate_deterministic(const LogicalMatrix& m, std::size_t x0,
                                               std::size_t t_max = 1000);

/// Simplex drift policy: within `renorm_eps` the vector passes through; up to
/// `hard_eps` it is renormalized and flagged; beyond that it is a modeling
/// error, not float noise, and throws.
ProbabilityVector enforce_simplex(std::vector<double> v, bool* renormalized = nullptr,
                                  double renorm_eps = kStochasticEps, double hard_eps = 1e-6);

ProbabilityVector step_conditional(const StochasticMatrix& q, const ProbabilityVector& p,
                                   bool* renormalized = nullptr);

/// One step of the independence model: the joint is formed once from the
/// factors, then every factor advances through its lifted matrix.
FactorState step_independent(const std::vector<DenseMatrix>& lifted, const FactorState& f,
                             bool* renormalized = nullptr);

StochasticTrajectory simulate_conditional(const StochasticMatrix& q, const ProbabilityVector& p0,
                                          const SimulationOptions& opt = {});

StochasticTrajectory simulate_independent(const std::vector<DenseMatrix>& lifted,
                                          const FactorState& f0,
                                          const SimulationOptions& opt = {});

/// First t whose next `window` consecutive steps all move less than `tol` in
/// the sup norm; absent when no such window fits in the trajectory.
std::optional<std::size_t> detect_stationary(const std::vector<ProbabilityVector>& joints,
                                             double tol = 1e-9, std::size_t window = 5);

struct DivergenceReport {
  std::vector<double> l1;  // d(t) = ||p_ind(t) - p_cond(t)||_1, t = 0..T
  double max = 0.0;
  std::size_t argmax = 0;
  std::optional<std::size_t> first_exceedance;
  double threshold = 1e-9;
};

/// Runs both stochastic models from the same product initial distribution.
DivergenceReport compare_models(const std::vector<DenseMatrix>& lifted, const FactorState& f0,
                                std::size_t t_steps, double threshold = 1e-9,
                                std::size_t dim_cap = kDefaultDimCap);

/// Sampling oracle for the conditional-independence semantics: each node's
/// next value is drawn from its lifted matrix's column at the current joint
/// state. Returns empirical joint distributions for t = 0..t_steps.
/// Per-sample RNG streams are derived from (seed, sample index), so the
/// aggregate is independent of evaluation order.
std::vector<std::vector<double>> monte_carlo_oracle(const std::vector<DenseMatrix>& lifted,
                                                    const ProbabilityVector& p0,
                                                    std::size_t t_steps, std::size_t samples,
                                                    std::uint64_t seed);

}  // namespace stplogic
