#include "aggsim/population.hpp"

#include <json.hpp>

#include "aggsim/errors.hpp"

namespace aggsim {

GamePopulation make_population(std::vector<Agent> agents, SymMatrix c_weight,
                               SymMatrix k_gain, ConstraintSet coupling,
                               Eigen::VectorXd constant_offset) {
  if (agents.empty()) raise(ErrorCode::invalid_input, "population is empty");
  int n = c_weight.dim();
  if (k_gain.dim() != n || coupling.dim() != n || constant_offset.size() != n)
    raise(ErrorCode::invalid_input, "population dimension mismatch");

  double ell = agents.front().modulus;
  for (const auto& a : agents) {
    if (a.feasible.dim() != n)
      raise(ErrorCode::invalid_input, "agent set dimension mismatch");
    ell = std::min(ell, a.modulus);
  }
  if (!(ell > 0.0))
    raise(ErrorCode::invalid_input, "population modulus must be positive");

  // Averaged bounding box of the local sets, compared against S.
  Eigen::VectorXd avg_lo = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd avg_hi = Eigen::VectorXd::Zero(n);
  for (const auto& a : agents) {
    auto [lo, hi] = a.feasible.bounding_box();
    avg_lo += lo;
    avg_hi += hi;
  }
  avg_lo /= static_cast<double>(agents.size());
  avg_hi /= static_cast<double>(agents.size());

  auto [s_lo, s_hi] = coupling.bounding_box();
  bool subset = ((s_lo - avg_lo).array() >= -1e-12).all() &&
                ((avg_hi - s_hi).array() >= -1e-12).all();
  bool intersects = ((s_hi - avg_lo).array() >= -1e-12).all() &&
                    ((avg_hi - s_lo).array() >= -1e-12).all();
  if (!intersects)
    raise(ErrorCode::infeasible_set,
          "coupling set does not meet the averaged feasible hull");

  GamePopulation pop{std::move(agents), std::move(c_weight), std::move(k_gain),
                     std::move(coupling), std::move(constant_offset), ell,
                     subset};
  return pop;
}

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json mat_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

nlohmann::json set_json(const ConstraintSet& s) {
  nlohmann::json j;
  if (const auto* b = std::get_if<Box>(&s.shape())) {
    j["kind"] = "box";
    j["lo"] = vec_json(b->lo);
    j["hi"] = vec_json(b->hi);
  } else if (const auto* bb = std::get_if<BoxWithBudget>(&s.shape())) {
    j["kind"] = "box_with_budget";
    j["lo"] = vec_json(bb->lo);
    j["hi"] = vec_json(bb->hi);
    j["budget"] = bb->budget;
  } else {
    const auto& r = std::get<Ray>(s.shape());
    j["kind"] = "ray";
    j["direction"] = vec_json(r.direction);
    j["xi_lo"] = r.xi_lo;
    j["xi_hi"] = r.xi_hi;
  }
  return j;
}

nlohmann::json cost_json(const CostFunction& c) {
  nlohmann::json j;
  if (c.is_quadratic()) {
    j["kind"] = "quadratic";
    j["q"] = mat_json(c.quadratic_form().q);
    j["c"] = vec_json(c.quadratic_form().c);
  } else {
    j["kind"] = "log_disutility";
    j["weight"] = c.log_form().weight;
    j["linear"] = c.log_form().linear;
  }
  return j;
}

}  // namespace

std::string population_fingerprint(const GamePopulation& pop) {
  nlohmann::json j;
  j["c_weight"] = mat_json(pop.c_weight.dense());
  j["k_gain"] = mat_json(pop.k_gain.dense());
  j["coupling"] = set_json(pop.coupling);
  j["constant_offset"] = vec_json(pop.constant_offset);
  j["ell"] = pop.ell;
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : pop.agents) {
    nlohmann::json aj;
    aj["id"] = a.id;
    aj["cost"] = cost_json(a.cost);
    aj["feasible"] = set_json(a.feasible);
    aj["modulus"] = a.modulus;
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j.dump();
}

}  // namespace aggsim
