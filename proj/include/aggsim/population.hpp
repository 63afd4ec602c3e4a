#pragma once

#include <string>
#include <vector>

#include "aggsim/agents.hpp"
#include "aggsim/linalg.hpp"

namespace aggsim {

// The N agents plus the data they share: the aggregate-influence weight C,
// the coordinator gain K, the coupling set S for the population average, and
// the common linear offset that was folded into the agent costs when the
// population was built.
struct GamePopulation {
  std::vector<Agent> agents;
  SymMatrix c_weight;
  SymMatrix k_gain;
  ConstraintSet coupling;
  Eigen::VectorXd constant_offset;
  double ell = 0.0;  // min agent modulus
  // Whether S fits inside the averaged feasible-box hull (the containment the
  // theory postulates). Diagnostic: the congestion capacities make it false
  // by construction, while the intersection the existence argument actually
  // needs is enforced.
  bool coupling_subset_ok = false;

  int dim() const { return c_weight.dim(); }
  int count() const { return static_cast<int>(agents.size()); }

  Eigen::VectorXd signal(const Eigen::VectorXd& sigma,
                         const Eigen::VectorXd& lambda) const {
    return c_weight.apply(sigma) + k_gain.apply(lambda);
  }
};

GamePopulation make_population(std::vector<Agent> agents, SymMatrix c_weight,
                               SymMatrix k_gain, ConstraintSet coupling,
                               Eigen::VectorXd constant_offset);

// Canonical JSON rendering of every number in the population; equal strings
// mean bit-identical builds.
std::string population_fingerprint(const GamePopulation& pop);

}  // namespace aggsim
