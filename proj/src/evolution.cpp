#include "stplogic/evolution.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "stplogic/detail/rng.hpp"
#include "stplogic/stp.hpp"

namespace stplogic {

namespace {

// 1-based categorical draw from a column distribution.
std::size_t draw_categorical(const DenseMatrix& m, std::size_t col_0based, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    acc += m(i, col_0based);
    if (u < acc) return i + 1;
  }
  return m.rows();
}

std::size_t draw_categorical(const std::vector<double>& p, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i + 1;
  }
  return p.size();
}

}  // namespace

FactorState::FactorState(std::vector<ProbabilityVector> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ShapeError("factor state needs at least one factor");
}

FactorState FactorState::point_mass(const std::vector<std::size_t>& alphabets,
                                    std::size_t joint_index) {
  const auto values = state_decode(joint_index, alphabets);
  std::vector<ProbabilityVector> fs;
  fs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    fs.push_back(ProbabilityVector::point_mass(alphabets[i], values[i]));
  return FactorState(std::move(fs));
}

std::vector<double> FactorState::joint() const {
  std::vector<double> j = factors_.front().values();
  for (std::size_t i = 1; i < factors_.size(); ++i) j = kron_vec(j, factors_[i].values());
  return j;
}

std::size_t FactorState::joint_dim() const {
  std::size_t k = 1;
  for (const auto& f : factors_) k = detail::checked_mul(k, f.dim());
  return k;
}

std::size_t step_deterministic(const LogicalMatrix& m, std::size_t state) {
  if (state < 1 || state > m.cols())
    throw ValidationError("state " + std::to_string(state) + " outside [1, " +
                          std::to_string(m.cols()) + "]");
  return m.col_index(state - 1);
}

DeterministicTrajectory simulate_deterministic(const LogicalMatrix& m, std::size_t x0,
                                               std::size_t t_max) {
  if (m.rows() != m.cols()) throw ShapeError("transition structure must be square");
  DeterministicTrajectory traj;
  traj.states.push_back(x0);
  std::unordered_map<std::size_t, std::size_t> seen;
  seen.emplace(x0, 0);
  std::size_t x = x0;
  for (std::size_t t = 1; t <= t_max; ++t) {
    x = step_deterministic(m, x);
    traj.states.push_back(x);
    const auto it = seen.find(x);
    if (it != seen.end()) {
      traj.transient = it->second;
      traj.cycle_length = t - it->second;
      break;
    }
    seen.emplace(x, t);
  }
  return traj;
}

ProbabilityVector enforce_simplex(std::vector<double> v, bool* renormalized, double renorm_eps,
                                  double hard_eps) {
  double sum = 0.0;
  for (double& e : v) {
    if (e < 0.0 && e > -renorm_eps) e = 0.0;
    sum += e;
  }
  const double drift = std::abs(sum - 1.0);
  if (drift > hard_eps)
    throw ValidationError("distribution mass drifted to " + std::to_string(sum) +
                          "; not float noise");
  if (drift > renorm_eps) {
    for (double& e : v) e /= sum;
    if (renormalized) *renormalized = true;
  }
  return ProbabilityVector(std::move(v), renorm_eps);
}

ProbabilityVector step_conditional(const StochasticMatrix& q, const ProbabilityVector& p,
                                   bool* renormalized) {
  if (q.cols() != p.dim()) throw ShapeError("distribution dimension does not match the matrix");
  return enforce_simplex(mat_vec(q.dense(), p.values()), renormalized);
}

FactorState step_independent(const std::vector<DenseMatrix>& lifted, const FactorState& f,
                             bool* renormalized) {
  if (lifted.size() != f.size()) throw ShapeError("factor count does not match lifted matrices");
  auto joint = f.joint();
  // Re-producting feeds the joint's mass drift back into every factor,
  // compounding it by a factor of n per step. Scrub float-level drift here;
  // real mass loss stays visible to the caller's drift policy.
  double mass = 0.0;
  for (const double e : joint) mass += e;
  if (mass != 1.0 && std::abs(mass - 1.0) <= kStochasticEps)
    for (double& e : joint) e /= mass;
  std::vector<ProbabilityVector> next;
  next.reserve(lifted.size());
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    if (lifted[i].cols() != joint.size())
      throw ShapeError("lifted matrix " + std::to_string(i + 1) + " has " +
                       std::to_string(lifted[i].cols()) + " columns, joint dimension is " +
                       std::to_string(joint.size()));
    next.push_back(enforce_simplex(mat_vec(lifted[i], joint), renormalized));
  }
  return FactorState(std::move(next));
}

StochasticTrajectory simulate_conditional(const StochasticMatrix& q, const ProbabilityVector& p0,
                                          const SimulationOptions& opt) {
  StochasticTrajectory traj;
  traj.mode = EvolutionMode::conditional;
  traj.joints.push_back(p0);
  std::size_t quiet = 0;
  for (std::size_t t = 1; t <= opt.t_max; ++t) {
    auto p = step_conditional(q, traj.joints.back(), &traj.renormalized);
    const double d = p.linf_distance(traj.joints.back());
    traj.joints.push_back(std::move(p));
    quiet = d < opt.stationary_tol ? quiet + 1 : 0;
    if (opt.stop_on_stationary && quiet >= opt.stationary_window) break;
  }
  traj.stationary_at = detect_stationary(traj.joints, opt.stationary_tol, opt.stationary_window);
  return traj;
}

StochasticTrajectory simulate_independent(const std::vector<DenseMatrix>& lifted,
                                          const FactorState& f0, const SimulationOptions& opt) {
  StochasticTrajectory traj;
  traj.mode = EvolutionMode::independent;
  traj.factors.push_back(f0.factors());
  traj.joints.push_back(enforce_simplex(f0.joint(), &traj.renormalized));
  FactorState f = f0;
  std::size_t quiet = 0;
  for (std::size_t t = 1; t <= opt.t_max; ++t) {
    f = step_independent(lifted, f, &traj.renormalized);
    auto joint = enforce_simplex(f.joint(), &traj.renormalized);
    const double d = joint.linf_distance(traj.joints.back());
    traj.factors.push_back(f.factors());
    traj.joints.push_back(std::move(joint));
    quiet = d < opt.stationary_tol ? quiet + 1 : 0;
    if (opt.stop_on_stationary && quiet >= opt.stationary_window) break;
  }
  traj.stationary_at = detect_stationary(traj.joints, opt.stationary_tol, opt.stationary_window);
  return traj;
}

std::optional<std::size_t> detect_stationary(const std::vector<ProbabilityVector>& joints,
                                             double tol, std::size_t window) {
  if (joints.empty()) return std::nullopt;
  if (window == 0) return 0;
  const std::size_t steps = joints.size() - 1;
  if (steps < window) return std::nullopt;
  std::size_t quiet = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double d = joints[s + 1].linf_distance(joints[s]);
    quiet = d < tol ? quiet + 1 : 0;
    if (quiet >= window) return s + 1 - window;
  }
  return std::nullopt;
}

DivergenceReport compare_models(const std::vector<DenseMatrix>& lifted, const FactorState& f0,
                                std::size_t t_steps, double threshold, std::size_t dim_cap) {
  DivergenceReport rep;
  rep.threshold = threshold;
  const StochasticMatrix q(khatri_rao_fold(lifted, dim_cap), kStochasticEps, /*strict=*/false);

  FactorState f = f0;
  ProbabilityVector p = enforce_simplex(f0.joint());
  rep.l1.reserve(t_steps + 1);
  for (std::size_t t = 0; t <= t_steps; ++t) {
    if (t > 0) {
      f = step_independent(lifted, f);
      p = step_conditional(q, p);
    }
    const auto joint = f.joint();
    double d = 0.0;
    for (std::size_t i = 0; i < joint.size(); ++i) d += std::abs(joint[i] - p[i]);
    rep.l1.push_back(d);
    if (d > rep.max) {
      rep.max = d;
      rep.argmax = t;
    }
    if (!rep.first_exceedance && d > threshold) rep.first_exceedance = t;
  }
  return rep;
}

std::vector<std::vector<double>> monte_carlo_oracle(const std::vector<DenseMatrix>& lifted,
                                                    const ProbabilityVector& p0,
                                                    std::size_t t_steps, std::size_t samples,
                                                    std::uint64_t seed) {
  if (samples == 0) throw ValidationError("need at least one sample");
  const std::size_t k = p0.dim();
  std::vector<std::size_t> alphabets;
  alphabets.reserve(lifted.size());
  std::size_t prod = 1;
  for (const auto& m : lifted) {
    if (m.cols() != k) throw ShapeError("lifted matrix columns do not match the distribution");
    alphabets.push_back(m.rows());
    prod = detail::checked_mul(prod, m.rows());
  }
  if (prod != k) throw ShapeError("factor alphabet product does not match the joint dimension");

  std::vector<std::vector<double>> counts(t_steps + 1, std::vector<double>(k, 0.0));
  std::vector<std::size_t> values(lifted.size());
  for (std::size_t s = 0; s < samples; ++s) {
    auto rng = detail::seeded_stream(seed, s);
    std::size_t x = draw_categorical(p0.values(), rng.uniform());
    counts[0][x - 1] += 1.0;
    for (std::size_t t = 1; t <= t_steps; ++t) {
      for (std::size_t i = 0; i < lifted.size(); ++i)
        values[i] = draw_categorical(lifted[i], x - 1, rng.uniform());
      x = state_encode(values, alphabets);
      counts[t][x - 1] += 1.0;
    }
  }
  const double inv = 1.0 / static_cast<double>(samples);
  for (auto& row : counts)
    for (double& c : row) c *= inv;
  return counts;
}

}  // namespace stplogic
