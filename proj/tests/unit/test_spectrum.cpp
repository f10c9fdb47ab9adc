#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nhs/basis.hpp"
#include "nhs/errors.hpp"
#include "nhs/korner.hpp"
#include "nhs/rho.hpp"
#include "nhs/spectrum.hpp"

using namespace nhs;

namespace {

// Layers carrying only the metadata the plan reads.
std::vector<BasisLayer> synthetic_layers(const RhoRule& rho) {
  BasisLayer a;
  a.l = 1;
  a.rho = rho;
  a.eta_prev = 0.0;
  a.eta_l = rho.sigma(5);
  a.max_a_norm = 1.0;
  BasisLayer b;
  b.l = 2;
  b.rho = rho;
  b.eta_prev = a.eta_l;
  b.eta_l = rho.sigma(9);
  b.max_a_norm = 0.5;
  return {a, b};
}

const SpectrumPlan& synthetic_plan() {
  static KornerRegistry reg;
  static const SpectrumPlan plan = build_plan(synthetic_layers(RhoRule::one_over_k_plus_2()),
                                              RhoRule::one_over_k_plus_2(), reg);
  return plan;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("epsilon and b formulas") {
  CHECK(compute_epsilon(2, 4.0) == 1.0 / 32.0);
  CHECK(compute_epsilon(1, 1.0) == 0.5);
  CHECK_THROWS(compute_epsilon(0, 1.0));
  CHECK(compute_b(10, 3, 2.0, 5.0) == 43);
  CHECK(compute_b(1, 1, 0.0, 1.0) == 4);
  // reals are ceiled first: 1 + 1 + 2*2 = 6, next integer 7
  CHECK(compute_b(1, 1, 0.5, 1.5) == 7);
  CHECK_THROWS_AS(compute_b(std::int64_t{1} << 40, std::int64_t{1} << 40, 0.0, 1.0), PlanOverflow);
}

TEST_CASE("lambda map on a hand-built plan") {
  std::vector<double> vals = {0.5, 0.3, 0.2, 0.1, 0.07, 0.05};
  for (int k = 6; k <= 260; ++k) vals.push_back(0.25 / k);
  SpectrumPlan plan;
  plan.rho = RhoRule::explicit_list(vals);
  plan.layers.push_back({1, 0.0, 0.0, 1.0, 0.5, 2, 100});
  plan.layers[0].eta_l = 4.0;
  const LambdaValue v = lambda_of(203, plan);
  CHECK(v.mapped);
  CHECK(v.n == 3);
  CHECK(v.s == 2);
  CHECK(v.value() == 203.1);
  const LambdaValue f = lambda_of(5, plan);
  CHECK_FALSE(f.mapped);
  CHECK(f.value() == 5.05);
  CHECK(lambda_of(-197, plan).n == 3);
  CHECK(lambda_of(-197, plan).s == -2);
  CHECK_THROWS_AS(lambda_of(plan.materialized_max() + 1, plan), OutOfMaterializedRange);
  for (std::int64_t m = -plan.materialized_max(); m <= plan.materialized_max(); ++m) {
    const LambdaValue w = lambda_of(m, plan);
    CHECK(w.rho == plan.rho(w.k));
    CHECK(std::abs(w.value() - static_cast<double>(m) - w.rho) <= 1e-13);
  }
}

TEST_CASE("layer membership is half open above layer 1") {
  const auto rho = RhoRule::one_over_k_plus_2();
  const LayerRecord r1{1, rho.sigma(5), 0.0, 1.0, 0.5, 1, 20};
  const LayerRecord r2{2, rho.sigma(9), rho.sigma(5), 1.0, 0.125, 1, 40};
  CHECK(in_layer(5, r1, rho));
  CHECK_FALSE(in_layer(5, r2, rho));
  CHECK(in_layer(0, r1, rho));
  CHECK(in_layer(-5, r1, rho));
  CHECK(in_layer(9, r2, rho));
  CHECK_FALSE(in_layer(10, r2, rho));
}

TEST_CASE("synthetic plan passes every structural check") {
  const SpectrumPlan& plan = synthetic_plan();
  REQUIRE(plan.l_max() == 2);
  const auto& r1 = plan.layer(1);
  const auto& r2 = plan.layer(2);
  CHECK(r1.epsilon_l == 0.5);
  CHECK(r2.epsilon_l == 0.25);
  CHECK(r1.epsilon_l * r1.max_a_norm < 1.0);
  CHECK(r2.epsilon_l * r2.max_a_norm < 0.25);
  CHECK(r1.b_l == compute_b(1, 1, 0.0, r1.eta_l));
  CHECK(r2.b_l == compute_b(r1.b_l, r1.d_l, r1.eta_l, r2.eta_l));
  CHECK(r2.d_l >= r1.d_l);
  const PlanChecks c = verify_plan(plan);
  CHECK(c.eps_def);
  CHECK(c.b_recurrence);
  CHECK(c.disjoint);
  CHECK(c.disjoint_enumerated);
  CHECK(c.lambda_membership);
  CHECK(c.decay_bound);
  CHECK(c.repetition_bound);
  CHECK(c.checked_indices > 0);
}

TEST_CASE("blocks") {
  const SpectrumPlan& plan = synthetic_plan();
  const auto rho = plan.rho;
  for (std::int64_t l = 1; l <= 2; ++l) {
    const auto& rec = plan.layer(l);
    std::int64_t blocks = 0;
    std::set<std::int64_t> seen;
    for (std::int64_t s = -rec.d_l; s <= rec.d_l; ++s) {
      if (s == 0) continue;
      ++blocks;
      const auto idx = block_indices(l, s, plan);
      const auto fr = block_frequencies(l, s, plan);
      const auto mirror = block_frequencies(l, -s, plan);
      REQUIRE(fr.size() == mirror.size());
      for (std::size_t i = 0; i < fr.size(); ++i) {
        const std::int64_t n = idx[i] - s * rec.b_l;
        CHECK(fr[i] == doctest::Approx(rho.sigma(n) + static_cast<double>(s * rec.b_l)).epsilon(1e-14));
        CHECK(fr[i] - mirror[i] == doctest::Approx(static_cast<double>(2 * s * rec.b_l)));
        CHECK(lambda_of(idx[i], plan).value() == fr[i]);
        CHECK(seen.insert(idx[i]).second);
      }
    }
    CHECK(blocks == 2 * rec.d_l);
    CHECK_THROWS(block_indices(l, 0, plan));
    CHECK_THROWS(block_indices(l, rec.d_l + 1, plan));
  }
}

TEST_CASE("corrupted plans fail the matching check") {
  SpectrumPlan bad_b = synthetic_plan();
  bad_b.layers[1].b_l += 1;
  CHECK_FALSE(verify_plan(bad_b).b_recurrence);

  SpectrumPlan bad_eps = synthetic_plan();
  bad_eps.layers[0].epsilon_l = 1.0;
  CHECK_FALSE(verify_plan(bad_eps).eps_def);

  SpectrumPlan overlap = synthetic_plan();
  overlap.layers[1].b_l = overlap.layers[0].b_l;
  CHECK_FALSE(verify_plan(overlap).disjoint);
}

TEST_CASE("plan json is byte identical across builds") {
  const auto rho = RhoRule::one_over_k_plus_2();
  KornerRegistry other;
  const SpectrumPlan again = build_plan(synthetic_layers(rho), rho, other);
  const std::string a = to_json(synthetic_plan()).dump();
  CHECK(to_json(again).dump() == a);
  const SpectrumPlan back = spectrum_plan_from_json(nlohmann::json::parse(a));
  CHECK(to_json(back).dump() == a);
  CHECK(back.layers == synthetic_plan().layers);
  const auto j = nlohmann::json::parse(a);
  REQUIRE(j.contains("lambda_map"));
  for (const auto& e : j["lambda_map"])
    CHECK(e["lambda"].get<double>() == lambda_of(e["m"].get<std::int64_t>(), back).value());
}

TEST_CASE("degree lookups are memoized") {
  KornerRegistry reg;
  const auto d1 = compute_d(1, 0.5, reg);
  CHECK(compute_d(1, 0.5, reg) == d1);
  CHECK(compute_d(2, 0.25, reg) >= d1);
}

}  // TEST_SUITE
