#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhs/trigpoly.hpp"
#include "oracles.hpp"

using namespace nhs;
using nhs::test::PolyGen;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};
}  // namespace

TEST_SUITE("trigpoly") {

TEST_CASE("canonical form merges duplicates and drops zeros") {
  TrigPoly p({{2.0, 1.0}, {-1.0, 3.0}, {2.0, -1.0}, {0.5, 0.0}});
  REQUIRE(p.size() == 1);
  CHECK(p.terms()[0].freq == -1.0);
  CHECK(p.terms()[0].coef == cplx(3.0));
  PolyGen gen(3);
  const TrigPoly q(gen.real_terms(20, 50));
  CHECK(TrigPoly(q.terms()) == q);
}

TEST_CASE("evaluate examples") {
  const auto g = SampleGrid::circle(16);
  for (const cplx& v : evaluate(TrigPoly({{0.0, 1.0}}), g)) CHECK(v == cplx(1.0));
  CHECK(std::abs(evaluate_at(TrigPoly({{1.0, 1.0}, {-1.0, 1.0}}), 0.0) - 2.0) < 1e-15);
  // e^{i pi/2} - 2i e^{3 i pi/2} = i - 2
  const cplx v = evaluate_at(TrigPoly({{0.5, 1.0}, {1.5, -2.0 * I}}), kPi);
  CHECK(std::abs(v - cplx(-2.0, 1.0)) < 1e-14);
}

TEST_CASE("evaluate on a grid agrees with per-term summation") {
  PolyGen gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto terms = gen.real_terms(20, 50);
    const TrigPoly p(terms);
    const auto g = SampleGrid::make(-7.0, 9.0, 64);
    const auto vals = evaluate(p, g);
    for (std::int64_t j = 0; j < g.count; ++j)
      CHECK(std::abs(vals[j] - test::direct_sum(terms, g.point(j))) < 1e-11);
  }
}

TEST_CASE("symmetric partial sum is a strict filter") {
  const TrigPoly p({{-3.0, 1.0}, {-1.0, 1.0}, {0.5, 1.0}});
  const TrigPoly s = symmetric_partial_sum(p, 2.0);
  REQUIRE(s.size() == 2);
  CHECK(s.terms()[0].freq == -1.0);
  CHECK(s.terms()[1].freq == 0.5);
  CHECK(symmetric_partial_sum(p, 3.5) == p);
  CHECK(symmetric_partial_sum(p, 3.0).size() == 2);
  CHECK(symmetric_partial_sum(p, 0.5).empty());

  PolyGen gen(5);
  const TrigPoly q(gen.real_terms(20, 50));
  for (double e1 : {1.0, 7.5, 20.0, 49.0}) {
    const TrigPoly a = symmetric_partial_sum(q, e1);
    const TrigPoly b = symmetric_partial_sum(q, e1 + 3.0);
    for (const Term& t : a.terms())
      CHECK(std::find(b.terms().begin(), b.terms().end(), t) != b.terms().end());
  }
}

TEST_CASE("maximal function examples") {
  const auto g = SampleGrid::circle(32);
  for (double v : maximal_function(TrigPoly({{3.0, cplx(0.6, -0.8)}}), g)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(maximal_at(TrigPoly({{-2.0, 1.0}, {2.0, 1.0}}), 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  // both +-2 enter together, so at x = pi/4 the only nonzero prefix is 2 cos(pi/2) = 0
  CHECK(maximal_at(TrigPoly({{-2.0, 1.0}, {2.0, 1.0}}), kPi / 4) < 1e-15);
}

TEST_CASE("maximal function matches brute-force prefix enumeration") {
  PolyGen gen(17);
  for (int rep = 0; rep < 25; ++rep) {
    auto terms = gen.real_terms(10, 50);
    if (rep % 3 == 0) terms.push_back({0.0, gen.coef()});
    if (rep % 4 == 0) terms.push_back({-terms[0].freq, gen.coef()});
    const TrigPoly p(terms);
    const auto g = SampleGrid::make(-3.0, 3.0, 100);
    const auto mf = maximal_function(p, g);
    for (std::int64_t j = 0; j < g.count; ++j) {
      CHECK(std::abs(mf[j] - test::brute_maximal(p.terms(), g.point(j))) <= 1e-12);
      CHECK(mf[j] >= std::abs(evaluate_at(p, g.point(j))) - 1e-12);
      CHECK(mf[j] >= 0.0);
    }
  }
}

TEST_CASE("a-norm, degree and max coefficient") {
  CHECK(a_norm(TrigPoly({{1.0, 1.0}, {2.0, -2.0 * I}})) == doctest::Approx(3.0));
  CHECK(a_norm(TrigPoly()) == 0.0);
  CHECK(degree(TrigPoly({{-3.0, 1.0}, {2.0, 1.0}})) == 3.0);
  CHECK(degree(TrigPoly()) == 0.0);
  PolyGen gen(23);
  for (int rep = 0; rep < 20; ++rep) {
    const TrigPoly p(gen.real_terms(20, 50));
    CHECK(a_norm(p) == doctest::Approx(test::brute_a_norm(p.terms())).epsilon(1e-14));
  }
}

TEST_CASE("u-norm estimate") {
  CHECK(u_norm_estimate(TrigPoly({{2.5, cplx(0.3, 0.4)}}), SampleGrid::circle(1024)) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(u_norm_estimate(TrigPoly({{1.0, 1.0}}), SampleGrid::circle(4096)) - 1.0) < 1e-9);

  PolyGen gen(29);
  for (int rep = 0; rep < 10; ++rep) {
    const TrigPoly p(gen.integer_terms(15, 40));
    const double coarse = u_norm_estimate(p, SampleGrid::circle(1 << 14));
    const double fine = u_norm_estimate(p, SampleGrid::circle(1 << 16));
    CHECK(std::abs(coarse - fine) <= 0.01 * fine);
    CHECK(fine <= a_norm(p) + 1e-9);
  }
}

TEST_CASE("u-norm checkpoint path brackets the exact grid maximum") {
  PolyGen gen(31);
  const TrigPoly p(gen.integer_terms(40, 300));
  const auto g = SampleGrid::circle(1 << 12);
  const UNormEstimate exact = u_norm_details(p, g);
  CHECK(exact.exact);
  UNormOptions opt;
  opt.exact_work_budget = 1.0;
  opt.max_checkpoints = 8;
  const UNormEstimate approx = u_norm_details(p, g, opt);
  CHECK(approx.value <= exact.value + 1e-12);
  CHECK(exact.value <= approx.value + approx.gap + 1e-12);
}

TEST_CASE("dilate") {
  const TrigPoly d = dilate(TrigPoly({{1.0, 1.0}, {3.0, 1.0}}), 5);
  REQUIRE(d.size() == 2);
  CHECK(d.terms()[0].freq == 5.0);
  CHECK(d.terms()[1].freq == 15.0);
  PolyGen gen(37);
  const TrigPoly p(gen.real_terms(20, 50));
  CHECK(dilate(p, 1) == p);
  CHECK_THROWS(dilate(p, 0));
  const TrigPoly p7 = dilate(p, 7);
  for (int j = 0; j < 50; ++j) {
    const double x = gen.uniform(-4.0, 4.0);
    CHECK(std::abs(evaluate_at(p7, x) - test::direct_sum(p.terms(), 7.0 * x)) <= 1e-10);
  }
}

TEST_CASE("multiply") {
  const TrigPoly prod = multiply(TrigPoly({{1.0, 1.0}}), TrigPoly({{0.5, 1.0}, {-1.0, 2.0}}));
  REQUIRE(prod.size() == 2);
  CHECK(prod.terms()[0].freq == 0.0);
  CHECK(prod.terms()[0].coef == cplx(2.0));
  CHECK(prod.terms()[1].freq == 1.5);
  CHECK(multiply(TrigPoly({{1.0, 1.0}}), TrigPoly()).empty());
  // 0.1 + 0.2 and 0.3 differ by one ulp and must merge
  const TrigPoly m = multiply(TrigPoly({{0.1, 1.0}, {0.0, 1.0}}), TrigPoly({{0.2, 1.0}, {0.3, 1.0}}));
  CHECK(m.size() == 3);

  PolyGen gen(41);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = gen.real_terms(20, 50);
    const auto b = gen.real_terms(20, 50);
    const TrigPoly pq = multiply(TrigPoly(a), TrigPoly(b));
    for (int j = 0; j < 50; ++j) {
      const double x = gen.uniform(-4.0, 4.0);
      CHECK(std::abs(evaluate_at(pq, x) - test::direct_sum(a, x) * test::direct_sum(b, x)) <= 1e-9);
    }
  }
}

TEST_CASE("add and scale") {
  PolyGen gen(43);
  const TrigPoly p(gen.real_terms(20, 50));
  CHECK(add(p, scale(p, -1.0)).empty());
  CHECK(scale(p, 0.0).empty());
  const auto a = gen.real_terms(20, 50);
  const auto b = gen.real_terms(20, 50);
  const TrigPoly s = add(TrigPoly(a), scale(TrigPoly(b), 2.0 * I));
  for (int j = 0; j < 50; ++j) {
    const double x = gen.uniform(-4.0, 4.0);
    CHECK(std::abs(evaluate_at(s, x) - (test::direct_sum(a, x) + 2.0 * I * test::direct_sum(b, x))) <= 1e-10);
  }
}

TEST_CASE("integer spectrum detection") {
  CHECK(has_integer_spectrum(TrigPoly({{3.0, 1.0}, {-2.0, 1.0}})));
  CHECK_FALSE(has_integer_spectrum(TrigPoly({{3.5, 1.0}})));
  CHECK(has_integer_spectrum(TrigPoly({{3.0 + 1e-11, 1.0}})));
}

TEST_CASE("json round trip is bit exact") {
  PolyGen gen(47);
  const TrigPoly p(gen.real_terms(20, 50));
  const auto j = to_json(p);
  REQUIRE(j.is_array());
  CHECK(j[0].contains("freq"));
  CHECK(j[0].contains("re"));
  CHECK(j[0].contains("im"));
  CHECK(trigpoly_from_json(nlohmann::json::parse(j.dump())) == p);
  const auto g = SampleGrid::window(3.0, 4096);
  CHECK(grid_from_json(nlohmann::json::parse(to_json(g).dump())) == g);
}

TEST_CASE("grid constructors") {
  const auto w = SampleGrid::window(2.0, 1024);
  CHECK(w.a == doctest::Approx(-2.0 * kPi));
  CHECK(w.b == doctest::Approx(2.0 * kPi));
  CHECK(w.count == 2048);
  CHECK_THROWS(SampleGrid::make(1.0, 1.0, 10));
  CHECK_THROWS(SampleGrid::make(0.0, 1.0, 0));
}

}  // TEST_SUITE
