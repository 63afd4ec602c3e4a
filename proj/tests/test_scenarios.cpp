#include <doctest.h>

#include <Eigen/Dense>
#include <set>

#include "aggsim/errors.hpp"
#include "aggsim/operator_core.hpp"
#include "aggsim/scenarios.hpp"

using namespace aggsim;

TEST_CASE("congestion population data") {
  auto [pop, sc] = build_congestion(40, 2024);

  CHECK(pop.dim() == 5);
  CHECK(pop.count() == 40);
  CHECK(sc.name == "congestion");
  CHECK(sc.seed == 2024);
  CHECK(sc.n_agents == 40);
  CHECK_FALSE(sc.params_json.empty());

  // Linearized delay slope: C = diag(1/beta^2) = I/400.
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(pop.c_weight(i, j) == (i == j ? 1.0 / 400.0 : 0.0));

  // Offset 1/beta folded into every user's linear term.
  for (int j = 0; j < 5; ++j)
    CHECK(pop.constant_offset[j] == doctest::Approx(0.05));

  // Default gain is the identity.
  for (int i = 0; i < 5; ++i) CHECK(pop.k_gain(i, i) == 1.0);

  const auto& caps = std::get<Box>(pop.coupling.shape());
  CHECK(caps.hi[0] == 2.0);
  CHECK(caps.hi[1] == 4.0);
  CHECK(caps.hi[2] == 4.0);
  CHECK(caps.hi[3] == 4.0);
  CHECK(caps.hi[4] == 2.0);
  CHECK(caps.lo.cwiseAbs().maxCoeff() == 0.0);

  // Routing directions live on the unit simplex; the log cost carries the
  // folded offset a^T (1/beta) = 0.05 and the compact-interval modulus.
  for (const auto& a : pop.agents) {
    const auto& ray = std::get<Ray>(a.feasible.shape());
    CHECK(ray.direction.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((ray.direction.array() >= 0.0).all());
    CHECK(ray.xi_lo == 0.0);
    CHECK(ray.xi_hi == 10.0);
    CHECK(a.cost.log_form().weight == 20.0);
    CHECK(a.cost.log_form().linear == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(a.modulus == doctest::Approx(20.0 / 121.0));
  }
  CHECK(pop.ell == doctest::Approx(20.0 / 121.0));

  // The capacity box cannot fit inside the averaged ray hull (the caps sum
  // to 16 but the per-user mass is 10), so the containment flag is down
  // while the intersection needed for existence holds.
  CHECK_FALSE(pop.coupling_subset_ok);
}

TEST_CASE("congestion sampling is deterministic and order-independent") {
  auto [a, sa] = build_congestion(12, 77);
  auto [b, sb] = build_congestion(12, 77);
  CHECK(population_fingerprint(a) == population_fingerprint(b));

  auto [c, scx] = build_congestion(12, 78);
  CHECK(population_fingerprint(a) != population_fingerprint(c));

  // Agent i's draw is keyed by index, not by population size.
  auto [big, sbig] = build_congestion(24, 77);
  for (int i = 0; i < 12; ++i) {
    const auto& ra = std::get<Ray>(a.agents[i].feasible.shape());
    const auto& rb = std::get<Ray>(big.agents[i].feasible.shape());
    CHECK(ra.direction == rb.direction);
  }
}

TEST_CASE("congestion design passes with the default gain") {
  auto [pop, sc] = build_congestion(10, 5);
  DesignReport rep = validate_design(pop.c_weight, pop.k_gain, pop.ell, 0.0,
                                     StepSchedule::constant(1.0));
  CHECK(rep.k_pd);
  CHECK(rep.c_plus_k_pd);
  CHECK(rep.beta > 0.0);
  DesignReport full = validate_design(pop.c_weight, pop.k_gain, pop.ell,
                                      0.9 * rep.beta,
                                      StepSchedule::constant(1.0));
  CHECK(full.pass());
}

TEST_CASE("pev population data") {
  PevParams params;
  auto [pop, sc] = build_pev(400, 99, params);

  CHECK(pop.dim() == 14);
  CHECK(pop.count() == 400);
  CHECK(sc.name == "pev");

  // Pricing constants a = 0.038, b = 0.06 enter C and the folded offset.
  for (int i = 0; i < 14; ++i) CHECK(pop.c_weight(i, i) == 0.038);
  std::vector<double> d = default_pev_demand(14);
  for (int j = 0; j < 14; ++j)
    CHECK(pop.constant_offset[j] ==
          doctest::Approx(0.038 * d[j] + 0.06).epsilon(1e-12));

  for (int i = 0; i < 14; ++i) CHECK(pop.k_gain(i, i) == 0.05);

  // Restrictive caps on slots 1, 2, 12, 13, 14.
  const auto& caps = std::get<Box>(pop.coupling.shape());
  std::set<int> tight = {0, 1, 11, 12, 13};
  for (int j = 0; j < 14; ++j)
    CHECK(caps.hi[j] == (tight.count(j) ? 0.04 : 0.1));

  int v2g_count = 0;
  for (const auto& a : pop.agents) {
    const auto& qc = a.cost.quadratic_form();
    CHECK(qc.diagonal);
    double q = 0.5 * qc.q(0, 0);
    CHECK(q >= 0.002);
    CHECK(q <= 0.006);
    for (int i = 1; i < 14; ++i) CHECK(qc.q(i, i) == qc.q(0, 0));

    // Linear term c^i 1 + a d + b 1 with c^i in [0.055, 0.095].
    double ci = qc.c[0] - pop.constant_offset[0];
    CHECK(ci >= 0.055 - 1e-12);
    CHECK(ci <= 0.095 + 1e-12);
    for (int j = 0; j < 14; ++j)
      CHECK(qc.c[j] - pop.constant_offset[j] ==
            doctest::Approx(ci).epsilon(1e-12));

    const auto& bb = std::get<BoxWithBudget>(a.feasible.shape());
    CHECK(bb.budget >= 0.6 - 1e-12);
    CHECK(bb.budget <= 1.0 + 1e-12);
    CHECK(bb.lo.sum() <= bb.budget);
    CHECK(bb.budget <= bb.hi.sum());

    bool v2g = bb.lo.minCoeff() < 0.0;
    v2g_count += v2g ? 1 : 0;
    for (int j = 0; j < 14; ++j) {
      CHECK((bb.hi[j] == 0.0 || bb.hi[j] == 0.25));
      CHECK(bb.lo[j] == (v2g ? -0.5 * bb.hi[j] : 0.0));
    }
    CHECK(a.modulus == doctest::Approx(2.0 * q));
  }
  // Roughly one fifth of the fleet has the vehicle-to-grid option.
  CHECK(v2g_count >= 400 * 0.12);
  CHECK(v2g_count <= 400 * 0.30);

  // Here the caps do fit inside the averaged charging hull.
  CHECK(pop.coupling_subset_ok);

  DesignReport rep = validate_design(pop.c_weight, pop.k_gain, pop.ell, 0.0,
                                     StepSchedule::constant(1.0));
  DesignReport full = validate_design(pop.c_weight, pop.k_gain, pop.ell,
                                      0.9 * rep.beta,
                                      StepSchedule::constant(1.0));
  CHECK(full.pass());
}

TEST_CASE("pev sampling is deterministic") {
  auto [a, sa] = build_pev(60, 31415);
  auto [b, sb] = build_pev(60, 31415);
  CHECK(population_fingerprint(a) == population_fingerprint(b));
  auto [c, scx] = build_pev(60, 31416);
  CHECK(population_fingerprint(a) != population_fingerprint(c));
}

TEST_CASE("pev custom profile length is validated") {
  PevParams p;
  p.d_profile = {1.0, 2.0};
  CHECK_THROWS_AS((void)build_pev(5, 1, p), Error);

  PevParams caps_bad;
  caps_bad.caps = {0.1};
  CHECK_THROWS_AS((void)build_pev(5, 1, caps_bad), Error);
}

TEST_CASE("anchor scenario") {
  auto [pop, sc] = build_remark1(2.0);
  CHECK(pop.count() == 2);
  CHECK(pop.dim() == 1);
  CHECK(pop.c_weight(0, 0) == -1.0);
  CHECK(pop.k_gain(0, 0) == 2.0);
  CHECK(pop.ell == 1.0);
  CHECK(sc.name == "remark1");
  CHECK(pop.coupling_subset_ok);

  // The boundary case C + K = 0 violates the gain design.
  CHECK_THROWS_AS((void)build_remark1(1.0), Error);
  CHECK_THROWS_AS((void)build_remark1(0.5), Error);
}
