#include "aggsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aggsim/errors.hpp"
#include "aggsim/linalg.hpp"
#include "aggsim/rng.hpp"

namespace aggsim {

namespace {

void check_bounds(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size() || lo.size() < 1)
    raise(ErrorCode::invalid_input, "bound vectors must match and be nonempty");
  if (!lo.allFinite() || !hi.allFinite())
    raise(ErrorCode::invalid_input, "non-finite bounds");
  if (((hi - lo).array() < 0.0).any())
    raise(ErrorCode::infeasible_set, "lower bound exceeds upper bound");
}

}  // namespace

ConstraintSet ConstraintSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  check_bounds(lo, hi);
  return ConstraintSet(Box{std::move(lo), std::move(hi)});
}

ConstraintSet ConstraintSet::box_with_budget(Eigen::VectorXd lo,
                                             Eigen::VectorXd hi,
                                             double budget) {
  check_bounds(lo, hi);
  if (!std::isfinite(budget))
    raise(ErrorCode::invalid_input, "non-finite budget");
  if (budget < lo.sum() || budget > hi.sum())
    raise(ErrorCode::infeasible_set,
          "budget outside [sum(lo), sum(hi)], the set is empty");
  return ConstraintSet(BoxWithBudget{std::move(lo), std::move(hi), budget});
}

ConstraintSet ConstraintSet::ray(Eigen::VectorXd direction, double xi_lo,
                                 double xi_hi) {
  if (direction.size() < 1 || !direction.allFinite())
    raise(ErrorCode::invalid_input, "invalid ray direction");
  if ((direction.array() < 0.0).any() ||
      std::abs(direction.sum() - 1.0) > 1e-9)
    raise(ErrorCode::invalid_input, "ray direction must lie on the unit simplex");
  if (!(xi_lo <= xi_hi) || !std::isfinite(xi_lo) || !std::isfinite(xi_hi))
    raise(ErrorCode::infeasible_set, "empty ray interval");
  return ConstraintSet(Ray{std::move(direction), xi_lo, xi_hi});
}

int ConstraintSet::dim() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ray>)
          return static_cast<int>(s.direction.size());
        else
          return static_cast<int>(s.lo.size());
      },
      v_);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ConstraintSet::bounding_box()
    const {
  if (const auto* b = std::get_if<Box>(&v_)) return {b->lo, b->hi};
  if (const auto* r = std::get_if<Ray>(&v_)) {
    // direction >= 0, so the interval endpoints give the box corners.
    return {r->direction * r->xi_lo, r->direction * r->xi_hi};
  }
  const auto& bb = std::get<BoxWithBudget>(v_);
  // Tight per-coordinate range under the budget equality.
  Eigen::Index n = bb.lo.size();
  Eigen::VectorXd lo(n), hi(n);
  double sum_lo = bb.lo.sum(), sum_hi = bb.hi.sum();
  for (Eigen::Index j = 0; j < n; ++j) {
    lo[j] = std::max(bb.lo[j], bb.budget - (sum_hi - bb.hi[j]));
    hi[j] = std::min(bb.hi[j], bb.budget - (sum_lo - bb.lo[j]));
  }
  return {lo, hi};
}

namespace detail {

Eigen::VectorXd budget_clamp(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, double budget) {
  auto eval = [&](double mu) {
    return ((v.array() - mu) / w.array()).cwiseMax(lo.array())
        .cwiseMin(hi.array())
        .sum();
  };

  // eval is nonincreasing in mu. At a the clamp saturates high (sum(hi) >=
  // budget by set nonemptiness), at b it saturates low, so [a, b] brackets
  // the multiplier; grow geometrically as a safety net for degenerate data.
  double a = (v - w.cwiseProduct(hi)).minCoeff();
  double b = (v - w.cwiseProduct(lo)).maxCoeff();
  double r = std::max(1.0, std::max(std::abs(a), std::abs(b)));
  for (int k = 0; k < 200 && eval(a) < budget; ++k) a -= r, r *= 2.0;
  r = std::max(1.0, std::max(std::abs(a), std::abs(b)));
  for (int k = 0; k < 200 && eval(b) > budget; ++k) b += r, r *= 2.0;
  if (eval(a) < budget || eval(b) > budget)
    raise(ErrorCode::infeasible_set, "budget bracket could not be established");

  for (int k = 0; k < 100; ++k) {
    double mid = 0.5 * (a + b);
    if (eval(mid) >= budget)
      a = mid;
    else
      b = mid;
    if (b - a <= 1e-15 * std::max(1.0, std::max(std::abs(a), std::abs(b))))
      break;
  }
  double mu = 0.5 * (a + b);
  return ((v.array() - mu) / w.array())
      .cwiseMax(lo.array())
      .cwiseMin(hi.array());
}

}  // namespace detail

Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& point) {
  if (point.size() != set.dim())
    raise(ErrorCode::invalid_input, "projection dimension mismatch");
  if (!point.allFinite())
    raise(ErrorCode::invalid_input, "projecting a non-finite point");

  if (const auto* b = std::get_if<Box>(&set.shape()))
    return point.cwiseMax(b->lo).cwiseMin(b->hi);

  if (const auto* r = std::get_if<Ray>(&set.shape())) {
    double denom = r->direction.squaredNorm();
    double xi = denom > 0.0 ? r->direction.dot(point) / denom : r->xi_lo;
    xi = std::clamp(xi, r->xi_lo, r->xi_hi);
    return r->direction * xi;
  }

  const auto& bb = std::get<BoxWithBudget>(set.shape());
  return detail::budget_clamp(point, Eigen::VectorXd::Ones(point.size()),
                              bb.lo, bb.hi, bb.budget);
}

double distance(const ConstraintSet& set, const Eigen::VectorXd& point) {
  return (point - project(set, point)).norm();
}

CostFunction CostFunction::quadratic(Eigen::MatrixXd q, Eigen::VectorXd c) {
  if (q.rows() != q.cols() || q.rows() != c.size() || q.rows() < 1)
    raise(ErrorCode::invalid_input, "quadratic cost dimension mismatch");
  if (!q.allFinite() || !c.allFinite())
    raise(ErrorCode::invalid_input, "non-finite quadratic cost data");
  QuadraticCost qc;
  qc.diagonal = q.isDiagonal(0.0);
  Eigen::VectorXd ev = sym_eigenvalues(0.5 * (q + q.transpose()));
  qc.eig_min = ev[0];
  qc.eig_max = ev[ev.size() - 1];
  if (!(qc.eig_min > 0.0))
    raise(ErrorCode::invalid_input, "quadratic cost matrix must be positive definite");
  qc.q = std::move(q);
  qc.c = std::move(c);
  return CostFunction(std::move(qc));
}

CostFunction CostFunction::log_disutility(double weight, double linear) {
  if (!(weight > 0.0) || !std::isfinite(weight) || !std::isfinite(linear))
    raise(ErrorCode::invalid_input, "log disutility requires finite weight > 0");
  return CostFunction(LogDisutilityCost{weight, linear});
}

Agent make_agent(int id, CostFunction cost, ConstraintSet feasible) {
  double modulus = 0.0;
  if (cost.is_quadratic()) {
    const auto& q = cost.quadratic_form();
    if (static_cast<int>(q.c.size()) != feasible.dim())
      raise(ErrorCode::invalid_input, "agent cost/set dimension mismatch");
    modulus = q.eig_min;
  } else {
    const auto* r = std::get_if<Ray>(&feasible.shape());
    if (r == nullptr)
      raise(ErrorCode::invalid_input,
            "log disutility is defined along a ray coordinate only");
    const auto& lc = cost.log_form();
    if (r->xi_lo < 0.0)
      raise(ErrorCode::invalid_input, "log disutility requires xi >= 0");
    // Second-derivative lower bound on the compact interval.
    modulus = lc.weight / ((1.0 + r->xi_hi) * (1.0 + r->xi_hi));
  }
  return Agent{id, std::move(cost), std::move(feasible), modulus};
}

double cost_value(const Agent& agent, const Eigen::VectorXd& y) {
  if (agent.cost.is_quadratic()) {
    const auto& q = agent.cost.quadratic_form();
    return 0.5 * y.dot(q.q * y) + q.c.dot(y);
  }
  const auto& r = std::get<Ray>(agent.feasible.shape());
  const auto& lc = agent.cost.log_form();
  double denom = r.direction.squaredNorm();
  double xi = denom > 0.0 ? r.direction.dot(y) / denom : 0.0;
  return -lc.weight * std::log1p(xi) + lc.linear * xi;
}

namespace detail {

Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& q,
                                   const Eigen::VectorXd& c_eff,
                                   const ConstraintSet& set, double eig_max,
                                   const ResponseOptions& opts,
                                   const Eigen::VectorXd* start) {
  const double step = 1.0 / eig_max;
  Eigen::VectorXd x =
      start != nullptr ? project(set, *start)
                       : project(set, Eigen::VectorXd::Zero(c_eff.size()));
  double gm_norm = 0.0;
  for (int k = 0; k < opts.max_inner; ++k) {
    Eigen::VectorXd g = q * x + c_eff;
    Eigen::VectorXd xn = project(set, x - step * g);
    gm_norm = (x - xn).norm() * eig_max;
    x = std::move(xn);
    if (gm_norm <= opts.tol) return x;
  }
  raise(ErrorCode::solver_stall,
        "projected gradient stalled, gradient-mapping norm " +
            std::to_string(gm_norm));
}

}  // namespace detail

Eigen::VectorXd optimal_response(const Agent& agent, const Eigen::VectorXd& u,
                                 const ResponseOptions& opts) {
  if (u.size() != agent.feasible.dim())
    raise(ErrorCode::invalid_input, "signal dimension mismatch");
  if (!u.allFinite())
    raise(ErrorCode::invalid_input, "non-finite incentive signal");

  if (!agent.cost.is_quadratic()) {
    // -w ln(1+xi) + s xi over [lo, hi], s = linear + a^T u. Decreasing when
    // s <= 0; otherwise the stationary point w/s - 1 is clamped.
    const auto& r = std::get<Ray>(agent.feasible.shape());
    const auto& lc = agent.cost.log_form();
    double s = lc.linear + r.direction.dot(u);
    double xi = s > 0.0 ? std::clamp(lc.weight / s - 1.0, r.xi_lo, r.xi_hi)
                        : r.xi_hi;
    return r.direction * xi;
  }

  const auto& qc = agent.cost.quadratic_form();
  Eigen::VectorXd v = -(qc.c + u);

  if (const auto* r = std::get_if<Ray>(&agent.feasible.shape())) {
    // One-dimensional quadratic along the ray.
    double curv = r->direction.dot(qc.q * r->direction);
    double xi = std::clamp(r->direction.dot(v) / curv, r->xi_lo, r->xi_hi);
    return r->direction * xi;
  }

  if (qc.diagonal) {
    if (const auto* b = std::get_if<Box>(&agent.feasible.shape())) {
      Eigen::VectorXd y = v.cwiseQuotient(qc.q.diagonal());
      return y.cwiseMax(b->lo).cwiseMin(b->hi);
    }
    const auto& bb = std::get<BoxWithBudget>(agent.feasible.shape());
    return detail::budget_clamp(v, qc.q.diagonal(), bb.lo, bb.hi, bb.budget);
  }

  try {
    return detail::projected_gradient(qc.q, qc.c + u, agent.feasible,
                                      qc.eig_max, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::solver_stall)
      raise(ErrorCode::solver_stall,
            "agent " + std::to_string(agent.id) + ": " + e.what());
    throw;
  }
}

double response_lipschitz_probe(const Agent& agent, const Eigen::MatrixXd& gain,
                                int samples, std::uint64_t seed) {
  if (samples < 2)
    raise(ErrorCode::invalid_input, "probe needs at least two samples");
  if (gain.rows() != agent.feasible.dim())
    raise(ErrorCode::invalid_input, "gain dimension mismatch");
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd u = 3.0 * rng.gaussian_vec(static_cast<int>(gain.cols()));
    Eigen::VectorXd v = 3.0 * rng.gaussian_vec(static_cast<int>(gain.cols()));
    double d = (u - v).norm();
    if (d < 1e-12) continue;
    Eigen::VectorXd xu = optimal_response(agent, gain * u);
    Eigen::VectorXd xv = optimal_response(agent, gain * v);
    worst = std::max(worst, (xu - xv).norm() / d);
  }
  return worst;
}

}  // namespace aggsim
