#include "edgeplan/fl_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "edgeplan/surrogate.hpp"

namespace edgeplan::sim {

double QuadraticProblem::loss(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd residual = features * x - targets;
  return 0.5 * residual.squaredNorm() / static_cast<double>(m_total()) +
         0.5 * ridge * x.squaredNorm();
}

Eigen::VectorXd QuadraticProblem::full_gradient(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd residual = features * x - targets;
  return features.transpose() * residual / static_cast<double>(m_total()) + ridge * x;
}

Eigen::VectorXd QuadraticProblem::sample_gradient(std::int64_t m, const Eigen::VectorXd& x) const {
  const double residual = features.row(m).dot(x) - targets(m);
  return features.row(m).transpose() * residual + ridge * x;
}

double QuadraticProblem::gap(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = x - x_star;
  return 0.5 * z.dot(hessian * z);
}

QuadraticProblem make_problem(Eigen::MatrixXd features, Eigen::VectorXd targets, double ridge) {
  if (features.rows() < 1 || features.cols() < 1) {
    throw std::invalid_argument("problem needs at least one sample and one dimension");
  }
  if (targets.size() != features.rows()) {
    throw std::invalid_argument("targets and features differ in sample count");
  }
  if (!(ridge > 0.0)) throw std::invalid_argument("ridge must be > 0");

  QuadraticProblem p;
  p.features = std::move(features);
  p.targets = std::move(targets);
  p.ridge = ridge;
  const double m = static_cast<double>(p.features.rows());
  p.hessian = p.features.transpose() * p.features / m;
  p.hessian.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.hessian, Eigen::EigenvaluesOnly);
  p.mu = eig.eigenvalues().minCoeff();
  p.lip = eig.eigenvalues().maxCoeff();
  p.x_star = p.hessian.ldlt().solve(p.features.transpose() * p.targets / m);
  return p;
}

QuadraticProblem generate_problem(int dim, std::int64_t m_total, double ridge,
                                  std::uint64_t seed) {
  if (dim < 1 || m_total < 1) throw std::invalid_argument("dim and m_total must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd features(m_total, dim);
  for (std::int64_t i = 0; i < m_total; ++i) {
    for (int j = 0; j < dim; ++j) features(i, j) = normal(rng);
  }
  Eigen::VectorXd planted(dim);
  for (int j = 0; j < dim; ++j) planted(j) = normal(rng);
  Eigen::VectorXd targets = features * planted;
  for (std::int64_t i = 0; i < m_total; ++i) targets(i) += 0.5 * normal(rng);
  return make_problem(std::move(features), std::move(targets), ridge);
}

DataPartition partition_indices(std::vector<std::int64_t> indices, int num_devices) {
  if (num_devices < 1) throw std::invalid_argument("num_devices must be >= 1");
  DataPartition out;
  out.devices.resize(num_devices);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.devices[i % num_devices].push_back(indices[i]);
  }
  out.collected = std::move(indices);
  return out;
}

DataPartition random_partition(std::int64_t m_total, std::int64_t collected, int num_devices,
                               std::uint64_t seed) {
  if (collected < 0 || collected > m_total) {
    throw std::invalid_argument("collected must lie in [0, m_total]");
  }
  std::vector<std::int64_t> order(m_total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(collected);
  return partition_indices(std::move(order), num_devices);
}

void validate(const DataPartition& partition, std::int64_t m_total) {
  std::vector<char> seen(m_total, 0);
  for (std::int64_t idx : partition.collected) {
    if (idx < 0 || idx >= m_total) throw std::invalid_argument("sample index out of range");
    if (seen[idx]) throw std::invalid_argument("collected set contains duplicates");
    seen[idx] = 1;
  }
  std::size_t assigned = 0;
  for (const auto& device : partition.devices) {
    for (std::int64_t idx : device) {
      if (idx < 0 || idx >= m_total || seen[idx] != 1) {
        throw std::invalid_argument("device data is not a disjoint split of the collected set");
      }
      seen[idx] = 2;
      ++assigned;
    }
  }
  if (assigned != partition.collected.size()) {
    throw std::invalid_argument("device data does not cover the collected set");
  }
}

GradientSplit partial_gradient(const QuadraticProblem& problem, const DataPartition& partition,
                               const Eigen::VectorXd& x) {
  if (partition.collected.empty()) throw std::invalid_argument("collected set is empty");
  const Eigen::VectorXd residual = problem.features * x - problem.targets;
  Eigen::VectorXd aggregate = Eigen::VectorXd::Zero(problem.dim());
  std::int64_t total = 0;
  for (const auto& device : partition.devices) {
    if (device.empty()) continue;
    Eigen::VectorXd local = Eigen::VectorXd::Zero(problem.dim());
    for (std::int64_t m : device) {
      local += problem.features.row(m).transpose() * residual(m);
    }
    const double size = static_cast<double>(device.size());
    local = local / size + problem.ridge * x;
    aggregate += size * local;
    total += static_cast<std::int64_t>(device.size());
  }
  GradientSplit out;
  out.g = aggregate / static_cast<double>(total);
  out.e = out.g - problem.full_gradient(x);
  return out;
}

namespace {

// max_m |grad f_m(x)|^2 from one pass over the residuals.
double max_sample_grad_sq(const QuadraticProblem& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd ax = p.features * x;
  const double xx = x.squaredNorm();
  double best = 0.0;
  for (std::int64_t m = 0; m < p.m_total(); ++m) {
    const double r = ax(m) - p.targets(m);
    const double aa = p.features.row(m).squaredNorm();
    // |a r + rho x|^2 = r^2 |a|^2 + 2 rho r a'x + rho^2 |x|^2
    const double v = r * r * aa + 2.0 * p.ridge * r * ax(m) + p.ridge * p.ridge * xx;
    best = std::max(best, v);
  }
  return best;
}

bool leq(double lhs, double rhs, double scale) {
  return lhs <= rhs + kCheckRelTol * std::max({std::abs(lhs), std::abs(rhs), scale});
}

std::vector<double> beta2_grid() {
  std::vector<double> grid{0.0};
  for (int j = 0; j <= 60; ++j) grid.push_back(std::pow(10.0, -4.0 + 6.0 * j / 60.0));
  return grid;
}

}  // namespace

Envelope fit_gradient_envelope(const QuadraticProblem& problem,
                               std::span<const Eigen::VectorXd> probes,
                               const EnvelopeTarget& target) {
  if (probes.empty()) throw std::invalid_argument("envelope fitting needs probe points");
  std::vector<double> sample_sq;
  std::vector<double> full_sq;
  for (const Eigen::VectorXd& x : probes) {
    sample_sq.push_back(max_sample_grad_sq(problem, x));
    full_sq.push_back(problem.full_gradient(x).squaredNorm());
  }

  const double m_total = static_cast<double>(problem.m_total());
  Envelope best;
  double best_value = 0.0;
  bool best_contractive = false;
  bool have = false;
  for (double beta2 : beta2_grid()) {
    double beta1 = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      beta1 = std::max(beta1, sample_sq[i] - beta2 * full_sq[i]);
    }
    const ConvergenceParams params{problem.mu, problem.lip, beta1, beta2, target.init_gap};
    const BoundValue bound = convergence_bound(target.rounds, target.collected, m_total, params);
    const bool contractive = !bound.non_contractive;
    const bool better = !have || (contractive && !best_contractive) ||
                        (contractive == best_contractive && bound.value < best_value);
    if (better) {
      best = {beta1, beta2};
      best_value = bound.value;
      best_contractive = contractive;
      have = true;
    }
  }
  return best;
}

int envelope_violations(const QuadraticProblem& problem, const Envelope& envelope,
                        std::span<const Eigen::VectorXd> points) {
  int count = 0;
  for (const Eigen::VectorXd& x : points) {
    const double lhs = max_sample_grad_sq(problem, x);
    const double rhs = envelope.beta1 + envelope.beta2 * problem.full_gradient(x).squaredNorm();
    if (!leq(lhs, rhs, 0.0)) ++count;
  }
  return count;
}

TrajectoryReport run_descent(const QuadraticProblem& problem, const DataPartition& partition,
                             int rounds, const DescentParams& params) {
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  validate(partition, problem.m_total());

  const double m_total = static_cast<double>(problem.m_total());
  const double collected = static_cast<double>(partition.collected.size());
  const double missing = (m_total - collected) / m_total;
  const double step = 1.0 / problem.lip;

  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> error_sq;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.dim());
  for (int i = 0; i <= rounds; ++i) {
    iterates.push_back(x);
    const GradientSplit split = partial_gradient(problem, partition, x);
    error_sq.push_back(split.e.squaredNorm());
    x = x - step * split.g;
  }

  // Probe set: every iterate plus Gaussian perturbations around random iterates.
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double radius = std::max((iterates.front() - problem.x_star).norm(), 1e-12);
  const double sigma = params.perturbation_scale * radius / std::sqrt(problem.dim());
  auto perturbed = [&](int count) {
    std::vector<Eigen::VectorXd> pts;
    std::uniform_int_distribution<std::size_t> pick(0, iterates.size() - 1);
    for (int n = 0; n < count; ++n) {
      Eigen::VectorXd p = iterates[pick(rng)];
      for (int j = 0; j < problem.dim(); ++j) p(j) += sigma * normal(rng);
      pts.push_back(std::move(p));
    }
    return pts;
  };
  std::vector<Eigen::VectorXd> probes = iterates;
  for (Eigen::VectorXd& p : perturbed(params.perturbation_probes)) probes.push_back(std::move(p));

  TrajectoryReport report;
  report.mu = problem.mu;
  report.lip = problem.lip;
  report.collected = static_cast<std::int64_t>(partition.collected.size());
  report.m_total = problem.m_total();

  const double gap0 = problem.gap(iterates.front());
  const EnvelopeTarget target{collected, static_cast<double>(rounds), gap0};
  Envelope env = fit_gradient_envelope(problem, probes, target);
  for (int refit = 0;; ++refit) {
    const std::vector<Eigen::VectorXd> holdout = perturbed(params.holdout_points);
    std::vector<Eigen::VectorXd> failing;
    for (const Eigen::VectorXd& p : holdout) {
      if (envelope_violations(problem, env, std::span(&p, 1)) > 0) failing.push_back(p);
    }
    if (failing.empty()) {
      report.envelope_validated = true;
      break;
    }
    if (refit >= params.max_refits) break;
    for (Eigen::VectorXd& p : failing) probes.push_back(std::move(p));
    env = fit_gradient_envelope(problem, probes, target);
    ++report.holdout_refits;
  }
  report.beta1_hat = env.beta1;
  report.beta2_hat = env.beta2;

  const ConvergenceParams cp{problem.mu, problem.lip, env.beta1, env.beta2, gap0};
  const Contraction psi = contraction_factor(collected, m_total, cp);
  report.psi_hat = psi.psi;
  report.psi_contractive = !psi.non_contractive;
  const double drift = 2.0 * missing * missing * env.beta1 / problem.lip;
  // Absolute slack for gaps near the round-off level of x*.
  const double gap_floor = 1e-12 * gap0;
  const double linear_rate = 1.0 - problem.mu / problem.lip;

  for (int i = 0; i <= rounds; ++i) {
    TrajectoryRow row;
    row.iteration = i;
    row.gap = problem.gap(iterates[i]);
    row.grad_error_sq = error_sq[i];
    row.theorem_bound = convergence_bound(i, collected, m_total, cp).value;
    row.error_bound = 4.0 * missing * missing * (env.beta1 + 2.0 * env.beta2 * problem.lip * row.gap);
    if (i == 0) {
      row.recursion_bound = row.gap;
      row.descent_bound = row.gap;
    } else {
      const TrajectoryRow& prev = report.rows.back();
      row.recursion_bound = psi.psi * prev.gap + drift;
      row.descent_bound = linear_rate * prev.gap + prev.grad_error_sq / (2.0 * problem.lip);
    }

    if (!leq(row.gap, row.theorem_bound, gap_floor)) report.bound_violated = true;
    // Slack for e scales with the per-sample gradient.
    const double grad_scale = 1e-3 * max_sample_grad_sq(problem, iterates[i]);
    if (!leq(row.grad_error_sq, row.error_bound, grad_scale)) report.error_bound_violated = true;
    if (!leq(row.gap, row.recursion_bound, gap_floor)) report.recursion_violated = true;
    if (!leq(row.gap, row.descent_bound, gap_floor)) report.descent_violated = true;
    report.rows.push_back(row);
  }
  if (report.collected == report.m_total) {
    const double limit = std::pow(linear_rate, rounds) * gap0;
    report.contraction_violated = !leq(report.rows.back().gap, limit, gap_floor);
  }
  return report;
}

}  // namespace edgeplan::sim
