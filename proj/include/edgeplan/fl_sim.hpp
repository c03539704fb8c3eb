#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace edgeplan::sim {

/// Ridge least squares: f(x; m) = 0.5 (a_m' x - y_m)^2 + 0.5 ridge |x|^2.
/// The full-data Hessian is constant, so mu, L, x* and every optimality gap
/// are available in closed form.
struct QuadraticProblem {
  Eigen::MatrixXd features;  // m_total x dim, row m is a_m
  Eigen::VectorXd targets;
  double ridge = 0.0;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd x_star;
  double mu = 0.0;
  double lip = 0.0;

  int dim() const { return static_cast<int>(features.cols()); }
  std::int64_t m_total() const { return features.rows(); }

  double loss(const Eigen::VectorXd& x) const;
  Eigen::VectorXd full_gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample_gradient(std::int64_t m, const Eigen::VectorXd& x) const;
  /// F(x) - F(x*) = 0.5 (x - x*)' H (x - x*).
  double gap(const Eigen::VectorXd& x) const;
};

/// Builds the derived quantities (Hessian, extreme eigenvalues, minimizer).
QuadraticProblem make_problem(Eigen::MatrixXd features, Eigen::VectorXd targets, double ridge);

/// Standard-normal features, targets from a planted model plus noise.
/// Deterministic per seed.
QuadraticProblem generate_problem(int dim, std::int64_t m_total, double ridge, std::uint64_t seed);

/// Collected set B split across devices.
struct DataPartition {
  std::vector<std::int64_t> collected;
  std::vector<std::vector<std::int64_t>> devices;
};

/// Round-robin split of `indices` over `num_devices`.
DataPartition partition_indices(std::vector<std::int64_t> indices, int num_devices);

/// The first `collected` entries of a seeded permutation of {0..m_total-1};
/// growing `collected` with the same seed yields nested sets.
DataPartition random_partition(std::int64_t m_total, std::int64_t collected, int num_devices,
                               std::uint64_t seed);

/// Throws std::invalid_argument if devices do not partition `collected`
/// or indices fall outside the dataset.
void validate(const DataPartition& partition, std::int64_t m_total);

struct GradientSplit {
  Eigen::VectorXd g;  // size-weighted aggregate of device gradients
  Eigen::VectorXd e;  // g - grad F(x)
};

/// Throws std::invalid_argument when the collected set is empty.
GradientSplit partial_gradient(const QuadraticProblem& problem, const DataPartition& partition,
                               const Eigen::VectorXd& x);

/// max_m |grad f_m(x)|^2 <= beta1 + beta2 |grad F(x)|^2.
struct Envelope {
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Operating point the fitted envelope is tuned for.
struct EnvelopeTarget {
  double collected = 0.0;
  double rounds = 0.0;
  double init_gap = 0.0;
};

/// For each beta2 on a fixed grid takes the smallest beta1 valid at every
/// probe, then returns the pair whose convergence bound at `target` is
/// smallest (contractive pairs preferred).
Envelope fit_gradient_envelope(const QuadraticProblem& problem,
                               std::span<const Eigen::VectorXd> probes,
                               const EnvelopeTarget& target);

/// Number of points at which the envelope fails (relative slack 1e-9).
int envelope_violations(const QuadraticProblem& problem, const Envelope& envelope,
                        std::span<const Eigen::VectorXd> points);

struct DescentParams {
  int perturbation_probes = 100;
  int holdout_points = 1000;
  int max_refits = 5;
  double perturbation_scale = 0.1;  // relative to |x0 - x*|
  std::uint64_t seed = 0;
};

struct TrajectoryRow {
  int iteration = 0;
  double gap = 0.0;
  double grad_error_sq = 0.0;
  double theorem_bound = 0.0;
  double error_bound = 0.0;       // 4 r^2 (beta1 + 2 beta2 L gap_i)
  double recursion_bound = 0.0;   // psi gap_{i-1} + 2 r^2 beta1 / L (gap_0 at i = 0)
  double descent_bound = 0.0;     // (1 - mu/L) gap_{i-1} + |e_{i-1}|^2 / (2L)
};

struct TrajectoryReport {
  std::vector<TrajectoryRow> rows;  // rounds + 1 entries
  double beta1_hat = 0.0;
  double beta2_hat = 0.0;
  double psi_hat = 0.0;
  double mu = 0.0;
  double lip = 0.0;
  std::int64_t collected = 0;
  std::int64_t m_total = 0;
  int holdout_refits = 0;
  bool envelope_validated = false;
  bool psi_contractive = false;
  bool bound_violated = false;        // gap_i > theorem_bound_i somewhere
  bool error_bound_violated = false;  // |e_i|^2 above the per-step bound
  bool recursion_violated = false;    // gap_{i+1} above psi gap_i + const
  bool descent_violated = false;      // gap_{i+1} above the one-step descent bound
  bool contraction_violated = false;  // full data only: gap_I > (1 - mu/L)^I gap_0
};

/// Relative slack used by every inequality check in the report. Gap checks
/// also treat anything below 1e-12 gap_0 as zero.
inline constexpr double kCheckRelTol = 1e-9;

/// x_{i+1} = x_i - g_i / L from x_0 = 0, followed by envelope fitting on the
/// iterates plus random perturbations, hold-out validation and the bound checks.
TrajectoryReport run_descent(const QuadraticProblem& problem, const DataPartition& partition,
                             int rounds, const DescentParams& params = {});

}  // namespace edgeplan::sim
