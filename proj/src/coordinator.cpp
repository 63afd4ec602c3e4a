#include "aggsim/coordinator.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "aggsim/errors.hpp"

namespace aggsim {

namespace {

void fill_responses(const GamePopulation& pop, const Eigen::VectorXd& u,
                    Eigen::MatrixXd& out, int workers) {
  const int count = pop.count();
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i)
      out.col(i) = optimal_response(pop.agents[i], u);
  };

  // Small populations are not worth the thread spawn.
  if (workers <= 1 || count < 256) {
    work(0, count);
    return;
  }

  int nthreads = std::min(workers, count);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(nthreads);
  int chunk = (count + nthreads - 1) / nthreads;
  for (int w = 0; w < nthreads; ++w) {
    int begin = w * chunk;
    int end = std::min(count, begin + chunk);
    threads.emplace_back([&, w, begin, end]() {
      try {
        work(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// In-place pairwise tree sum over columns [0, count); the result lands in
// column 0. Fixed association independent of worker count.
void tree_reduce(Eigen::MatrixXd& m, int count) {
  for (int stride = 1; stride < count; stride *= 2)
    for (int i = 0; i + stride < count; i += 2 * stride)
      m.col(i) += m.col(i + stride);
}

Eigen::VectorXd aggregate_into(const GamePopulation& pop,
                               const Eigen::VectorXd& sigma,
                               const Eigen::VectorXd& lambda, int workers,
                               Eigen::MatrixXd& scratch) {
  Eigen::VectorXd u = pop.signal(sigma, lambda);
  fill_responses(pop, u, scratch, workers);
  tree_reduce(scratch, pop.count());
  return scratch.col(0) / static_cast<double>(pop.count());
}

}  // namespace

Eigen::MatrixXd all_responses(const GamePopulation& pop,
                              const Eigen::VectorXd& sigma,
                              const Eigen::VectorXd& lambda, int workers) {
  Eigen::MatrixXd out(pop.dim(), pop.count());
  fill_responses(pop, pop.signal(sigma, lambda), out, workers);
  return out;
}

Eigen::VectorXd aggregate(const GamePopulation& pop,
                          const Eigen::VectorXd& sigma,
                          const Eigen::VectorXd& lambda, int workers) {
  Eigen::MatrixXd scratch(pop.dim(), pop.count());
  return aggregate_into(pop, sigma, lambda, workers, scratch);
}

Eigen::VectorXd coordinator_response(const Eigen::VectorXd& sigma,
                                     const Eigen::VectorXd& lambda,
                                     const SymMatrix& k_gain,
                                     const ConstraintSet& coupling) {
  return project(coupling, -k_gain.apply(sigma - lambda));
}

namespace {

Eigen::VectorXd gamma_from_parts(const Eigen::VectorXd& agg,
                                 const Eigen::VectorXd& x0) {
  Eigen::VectorXd g(agg.size() * 2);
  g.head(agg.size()) = -agg;
  g.tail(agg.size()) = -(2.0 * agg - x0);
  return g;
}

}  // namespace

Eigen::VectorXd gamma(const GamePopulation& pop, const Eigen::VectorXd& sigma,
                      const Eigen::VectorXd& lambda, int workers) {
  Eigen::VectorXd agg = aggregate(pop, sigma, lambda, workers);
  Eigen::VectorXd x0 =
      coordinator_response(sigma, lambda, pop.k_gain, pop.coupling);
  return gamma_from_parts(agg, x0);
}

Eigen::VectorXd theta(const GamePopulation& pop, const Eigen::VectorXd& sigma,
                      const Eigen::VectorXd& lambda, int workers) {
  Eigen::VectorXd z = join_state(sigma, lambda);
  return apply_M(z) + gamma(pop, sigma, lambda, workers);
}

namespace {

Eigen::VectorXd fb_update(const Eigen::VectorXd& z, const Eigen::VectorXd& g,
                          double epsilon, double alpha) {
  Eigen::VectorXd inner = resolvent_M(epsilon, z - epsilon * g);
  return (1.0 - alpha) * z + alpha * inner;
}

}  // namespace

CoordinatorState step(const GamePopulation& pop, const CoordinatorState& state,
                      double epsilon, double alpha, int workers) {
  if (!(alpha > 0.0 && alpha < 1.5))
    raise(ErrorCode::design_violation, "step size outside (0, 3/2)");
  Eigen::VectorXd z = join_state(state.sigma, state.lambda);
  Eigen::VectorXd g = gamma(pop, state.sigma, state.lambda, workers);
  Eigen::VectorXd zn = fb_update(z, g, epsilon, alpha);
  int n = pop.dim();
  return CoordinatorState{zn.head(n), zn.tail(n), state.t + 1};
}

Eigen::VectorXd fb_map(const GamePopulation& pop, const Eigen::VectorXd& z,
                       double epsilon, int workers) {
  int n = pop.dim();
  Eigen::VectorXd g = gamma(pop, z.head(n), z.tail(n), workers);
  return resolvent_M(epsilon, z - epsilon * g);
}

long Trajectory::iterations_to(double threshold) const {
  for (const auto& r : records)
    if (r.residual <= threshold) return r.t;
  return -1;
}

Trajectory run(const GamePopulation& pop, const RunConfig& config,
               const CoordinatorState& init) {
  if (!(config.epsilon > 0.0))
    raise(ErrorCode::design_violation, "run requires epsilon > 0");
  if (init.sigma.size() != pop.dim() || init.lambda.size() != pop.dim())
    raise(ErrorCode::invalid_input, "initial state dimension mismatch");
  if (distance(pop.coupling, init.sigma) > 1e-9)
    raise(ErrorCode::invalid_input, "initial sigma must lie in the coupling set");

  const int n = pop.dim();
  Trajectory traj;
  traj.records.reserve(256);

  Eigen::VectorXd z = join_state(init.sigma, init.lambda);
  const double guard =
      config.divergence_factor * (1.0 + z.norm());
  Eigen::MatrixXd scratch(n, pop.count());
  auto start = std::chrono::steady_clock::now();

  for (long t = 0;; ++t) {
    Eigen::VectorXd sigma = z.head(n);
    Eigen::VectorXd lambda = z.tail(n);
    Eigen::VectorXd agg =
        aggregate_into(pop, sigma, lambda, config.workers, scratch);
    Eigen::VectorXd x0 =
        coordinator_response(sigma, lambda, pop.k_gain, pop.coupling);
    Eigen::VectorXd g = gamma_from_parts(agg, x0);
    Eigen::VectorXd th = apply_M(z) + g;
    double residual = th.norm();
    double alpha = config.schedule.alpha(t);
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    traj.records.push_back(
        TrajectoryRecord{t, sigma, lambda, agg, residual, alpha, wall});

    if (!std::isfinite(residual) || z.norm() > guard) {
      traj.status = RunStatus::diverged;
      break;
    }
    if (residual <= config.tol) {
      traj.status = RunStatus::converged;
      break;
    }
    if (t >= config.max_iter) {
      traj.status = RunStatus::max_iterations;
      break;
    }
    z = fb_update(z, g, config.epsilon, alpha);
  }
  return traj;
}

}  // namespace aggsim
