#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <variant>

namespace aggsim {

// Local feasible sets. Every variant is compact and convex:
//   Box            {y : lo <= y <= hi}
//   BoxWithBudget  {y : lo <= y <= hi, 1^T y = budget}
//   Ray            {direction * xi : xi in [xi_lo, xi_hi]}, direction on the
//                  unit simplex
struct Box {
  Eigen::VectorXd lo, hi;
};

struct BoxWithBudget {
  Eigen::VectorXd lo, hi;
  double budget;
};

struct Ray {
  Eigen::VectorXd direction;
  double xi_lo, xi_hi;
};

class ConstraintSet {
 public:
  static ConstraintSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConstraintSet box_with_budget(Eigen::VectorXd lo, Eigen::VectorXd hi,
                                       double budget);
  static ConstraintSet ray(Eigen::VectorXd direction, double xi_lo,
                           double xi_hi);

  int dim() const;
  const std::variant<Box, BoxWithBudget, Ray>& shape() const { return v_; }
  bool is_ray() const { return std::holds_alternative<Ray>(v_); }

  // Componentwise bounding interval of the set (tight per coordinate for the
  // budget variant).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box() const;

 private:
  explicit ConstraintSet(std::variant<Box, BoxWithBudget, Ray> v)
      : v_(std::move(v)) {}
  std::variant<Box, BoxWithBudget, Ray> v_;
};

// Euclidean projection onto the set.
Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& point);

double distance(const ConstraintSet& set, const Eigen::VectorXd& point);

// Agent cost f(y), strongly convex on the agent's feasible set:
//   Quadratic       (1/2) y^T Q y + c^T y, Q > 0
//   LogDisutility   -w ln(1 + xi) + linear * xi along the ray coordinate
struct QuadraticCost {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
  bool diagonal = false;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

struct LogDisutilityCost {
  double weight = 0.0;
  double linear = 0.0;
};

class CostFunction {
 public:
  static CostFunction quadratic(Eigen::MatrixXd q, Eigen::VectorXd c);
  static CostFunction log_disutility(double weight, double linear = 0.0);

  const std::variant<QuadraticCost, LogDisutilityCost>& form() const {
    return v_;
  }
  bool is_quadratic() const {
    return std::holds_alternative<QuadraticCost>(v_);
  }
  const QuadraticCost& quadratic_form() const {
    return std::get<QuadraticCost>(v_);
  }
  const LogDisutilityCost& log_form() const {
    return std::get<LogDisutilityCost>(v_);
  }

 private:
  explicit CostFunction(std::variant<QuadraticCost, LogDisutilityCost> v)
      : v_(std::move(v)) {}
  std::variant<QuadraticCost, LogDisutilityCost> v_;
};

struct Agent {
  int id = 0;
  CostFunction cost;
  ConstraintSet feasible;
  double modulus = 0.0;  // strong-convexity modulus valid on the feasible set
};

// Validates the cost/set pairing and computes the modulus:
// min eigenvalue of Q for quadratic costs, w/(1+xi_hi)^2 for the log
// disutility on its compact ray interval.
Agent make_agent(int id, CostFunction cost, ConstraintSet feasible);

// f(y) evaluated at a feasible point.
double cost_value(const Agent& agent, const Eigen::VectorXd& y);

struct ResponseOptions {
  double tol = 1e-10;    // gradient-mapping norm at termination
  int max_inner = 10000;
};

// argmin over the feasible set of f(y) + u^T y. Closed form wherever the
// structure allows (diagonal quadratic with box or budget-box, any quadratic
// on a ray, log disutility on a ray); projected gradient with step 1/L
// otherwise.
Eigen::VectorXd optimal_response(const Agent& agent, const Eigen::VectorXd& u,
                                 const ResponseOptions& opts = {});

// Max observed ||x*(A u) - x*(A v)|| / ||u - v|| over random pairs; the
// response mapping is (||A||/modulus)-Lipschitz, so the ratio must stay below
// that bound.
double response_lipschitz_probe(const Agent& agent, const Eigen::MatrixXd& gain,
                                int samples, std::uint64_t seed);

namespace detail {

// Solves sum_j clamp((v_j - mu)/w_j, lo_j, hi_j) = budget for mu (the map is
// nonincreasing in mu) and returns the clamped vector. Bracket grown
// geometrically, then bisected; deterministic and derivative-free.
Eigen::VectorXd budget_clamp(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi, double budget);

// Projected gradient on (1/2) y^T Q y + c_eff^T y over the set; exposed so
// the closed-form paths can be audited against it. start defaults to the
// projection of the origin.
Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& q,
                                   const Eigen::VectorXd& c_eff,
                                   const ConstraintSet& set, double eig_max,
                                   const ResponseOptions& opts,
                                   const Eigen::VectorXd* start = nullptr);

}  // namespace detail

}  // namespace aggsim
