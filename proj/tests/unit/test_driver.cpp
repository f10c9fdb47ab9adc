#include <doctest.h>

#include <cmath>

#include "nhs/driver.hpp"
#include "nhs/errors.hpp"
#include "nhs/targets.hpp"

using namespace nhs;

namespace {

Target poly_target(const TrigPoly& p) {
  return {"poly", [p](const SampleGrid& g) { return evaluate(p, g); }};
}

// One completed step whose H_1 is `h`, as if produced by an earlier run.
RepresentationState seeded_state(const TrigPoly& h) {
  RepresentationState s;
  s.N = 1;
  s.l_prev = 6;
  StepReport rep;
  rep.N = 1;
  rep.profile = kProfileDesk;
  rep.delta_N = 0.2;
  rep.window_scale = 1.0;
  s.reports.push_back(rep);
  s.h_polys.push_back(h);
  s.q_polys.push_back(TrigPoly());
  s.step_coefficients.emplace_back();
  return s;
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("desk and faithful delta schedules") {
  KornerConfig kc;
  kc.probe_eps = {0.5};
  KornerRegistry reg(kc);
  DriverConfig desk;
  CHECK(delta_schedule(1, desk, reg) == 0.2);
  CHECK(delta_schedule(4, desk, reg) == 0.05);
  DriverConfig faithful;
  faithful.profile = kProfileFaithful;
  const double d1 = delta_schedule(1, faithful, reg);
  CHECK(d1 == 1.0 / reg.u_bound_for_delta(0.125));
  faithful.relaxation = 3.0;
  CHECK(delta_schedule(1, faithful, reg) == doctest::Approx(3.0 * d1).epsilon(1e-15));
  CHECK(desk.window_scale(3) == 3.0);
  CHECK(faithful.window_scale(3) == 1.0);
}

TEST_CASE("zero target runs without materializing anything") {
  PipelineContext ctx(RhoRule::one_over_k_plus_2());
  const Target zero = builtin_target("zero");
  const RepresentationState s = run(zero, 3, ctx);
  REQUIRE(s.N == 3);
  CHECK(s.coefficients.empty());
  CHECK(ctx.layers().empty());
  CHECK_FALSE(ctx.plan().has_value());
  const std::int64_t want_l[] = {6, 11, 16};
  for (std::int64_t N = 1; N <= 3; ++N) {
    const StepReport& r = s.reports[static_cast<std::size_t>(N - 1)];
    CHECK(r.l_N == want_l[N - 1]);
    CHECK(r.M_N == 0);
    CHECK_FALSE(r.materialized);
    CHECK(r.exceed_Gg == 0.0);
    CHECK(r.exceed_HG == 0.0);
    CHECK(r.exceed_KH_window == 0.0);
    CHECK(r.exceed_fS == 0.0);
    CHECK(r.h_star_max == 0.0);
    CHECK(r.bound_checks.size() == 11);
    CHECK(r.all_checks());
    CHECK(s.h_polys[static_cast<std::size_t>(N - 1)].empty());
    const auto v = verify_fS(s, zero, N);
    CHECK(v.passed);
    CHECK(v.report.estimated_measure == 0.0);
  }
  for (const DecayStats& d : maximal_decay(s, 1, 3)) {
    CHECK(d.max == 0.0);
    CHECK(d.median == 0.0);
    CHECK(d.first_summand_ok);
  }
  CHECK(partial_sum(s, 3).empty());
}

TEST_CASE("state json round trip") {
  PipelineContext ctx(RhoRule::one_over_k_plus_2());
  const RepresentationState s = run(builtin_target("zero"), 2, ctx);
  const std::string a = to_json(s).dump();
  CHECK(to_json(representation_from_json(nlohmann::json::parse(a))).dump() == a);
  const auto rep = step_report_from_json(to_json(s.reports[1]));
  CHECK(to_json(rep) == to_json(s.reports[1]));
}

TEST_CASE("N_max zero gives the empty state") {
  PipelineContext ctx(RhoRule::one_over_k_plus_2());
  const RepresentationState s = run(builtin_target("clipped-step"), 0, ctx);
  CHECK(s.N == 0);
  CHECK(s.reports.empty());
  CHECK_THROWS_AS(run(builtin_target("zero"), -1, ctx), InputContractError);
}

TEST_CASE("a target equal to the current partial sum adds nothing") {
  const auto rho = RhoRule::one_over_k_plus_2();
  const TrigPoly h({{rho.sigma(3), cplx(0.7, -0.2)}, {rho.sigma(-5), 0.4}});
  const RepresentationState s1 = seeded_state(h);
  PipelineContext ctx(rho);
  const RepresentationState s2 = step(s1, poly_target(h), ctx);
  CHECK(s2.N == 2);
  CHECK(s2.h_polys[1].empty());
  CHECK(s2.reports[1].M_N == 0);
  CHECK(s2.reports[1].exceed_fS == 0.0);
  CHECK(s2.reports[1].all_checks());
  CHECK(partial_sum(s2, 2) == h);
  CHECK(ctx.layers().empty());
}

TEST_CASE("dropping H_N breaks the f - S_N check") {
  const auto rho = RhoRule::one_over_k_plus_2();
  const TrigPoly h({{rho.sigma(3), 1.0}});
  const Target f = poly_target(h);
  const RepresentationState full = seeded_state(h);
  CHECK(verify_fS(full, f, 1).passed);
  RepresentationState cut = full;
  cut.h_polys[0] = TrigPoly();
  const auto v = verify_fS(cut, f, 1);
  CHECK_FALSE(v.passed);
  CHECK(v.report.estimated_measure == doctest::Approx(2.0 * std::acos(-1.0)));
  CHECK_THROWS(verify_fS(full, f, 2));
}

TEST_CASE("targets") {
  const auto g = SampleGrid::window(1.0, 8);
  const auto step = builtin_target("clipped-step").samples(g);
  for (std::int64_t j = 0; j < g.count; ++j) CHECK(step[j] == cplx(g.point(j) > 0.0 ? 1.0 : 0.0));
  const auto wide = builtin_target("clipped-step").samples(SampleGrid::window(3.0, 8));
  CHECK(wide.back() == cplx(0.0));
  const auto gauss = builtin_target("gaussian").samples(g);
  CHECK(gauss[4].real() == doctest::Approx(std::exp(-g.point(4) * g.point(4) / 2.0)));
  CHECK_THROWS(builtin_target("nope"));
  CHECK(builtin_target_names().size() == 3);
}

TEST_CASE("driver config json") {
  DriverConfig c;
  c.profile = kProfileFaithful;
  c.m_budget = 64;
  CHECK(to_json(driver_config_from_json(to_json(c))) == to_json(c));
}

}  // TEST_SUITE
