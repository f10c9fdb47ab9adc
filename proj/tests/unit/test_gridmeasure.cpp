#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nhs/errors.hpp"
#include "nhs/gridmeasure.hpp"
#include "oracles.hpp"

using namespace nhs;

TEST_SUITE("gridmeasure") {

TEST_CASE("linear function on the unit interval") {
  const auto g = SampleGrid::make(0.0, 1.0, 1000);
  std::vector<double> s;
  for (double x : g.points()) s.push_back(x);
  const auto r = exceedance_measure(std::span<const double>(s), g, 0.5);
  CHECK(std::abs(r.estimated_measure - 0.5) <= 2.0 / 1000);
  CHECK(r.grid_count == 1000);
  CHECK(r.estimated_measure == doctest::Approx(r.exceed_count * g.step()));
}

TEST_CASE("trivial sample sets") {
  const auto g = SampleGrid::circle(4096);
  std::vector<double> zeros(g.count, 0.0);
  CHECK(exceedance_measure(std::span<const double>(zeros), g, 0.1).estimated_measure == 0.0);
  std::vector<double> sines;
  for (double x : g.points()) sines.push_back(std::sin(x));
  CHECK(exceedance_measure(std::span<const double>(sines), g, 1.1).exceed_count == 0);
  // closed threshold: |1| >= 1 counts
  std::vector<double> ones(g.count, 1.0);
  CHECK(exceedance_measure(std::span<const double>(ones), g, 1.0).estimated_measure == doctest::Approx(g.length()));
}

TEST_CASE("length mismatch is a contract error") {
  const auto g = SampleGrid::circle(16);
  std::vector<double> s(15, 0.0);
  CHECK_THROWS_AS(exceedance_measure(std::span<const double>(s), g, 0.1), InputContractError);
  std::vector<cplx> t(3);
  CHECK_THROWS_AS(exceedance_of_difference(TrigPoly(), t, g, 0.1), InputContractError);
}

TEST_CASE("difference against a polynomial") {
  const auto g = SampleGrid::circle(2048);
  const TrigPoly p({{1.0, 1.0}, {-3.0, cplx(0.0, 2.0)}});
  const auto exact = evaluate(p, g);
  CHECK(exceedance_of_difference(p, exact, g, 1e-9).exceed_count == 0);

  const std::vector<cplx> ones(g.count, cplx(1.0));
  CHECK(exceedance_of_difference(TrigPoly(), ones, g, 0.5).estimated_measure == doctest::Approx(g.length()));

  test::PolyGen gen(7);
  std::vector<cplx> perturbed = exact;
  for (auto& v : perturbed) v += cplx(gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5));
  std::vector<cplx> diff(g.count);
  for (std::int64_t j = 0; j < g.count; ++j) diff[j] = exact[j] - perturbed[j];
  const auto two_step = exceedance_measure(std::span<const cplx>(diff), g, 0.3);
  CHECK(exceedance_of_difference(p, perturbed, g, 0.3) == two_step);
}

TEST_CASE("monotone in the threshold and scale equivariant") {
  const auto g = SampleGrid::make(-5.0, 5.0, 3000);
  test::PolyGen gen(13);
  const auto vals = evaluate(TrigPoly(gen.real_terms(10, 6)), g);
  double prev = g.length();
  for (double t = 0.0; t < 5.0; t += 0.25) {
    const double m = exceedance_measure(std::span<const cplx>(vals), g, t).estimated_measure;
    CHECK(m <= prev);
    prev = m;
  }
  std::vector<cplx> scaled = vals;
  for (auto& v : scaled) v *= 2.0;
  for (double t : {0.1, 0.7, 1.9}) {
    CHECK(exceedance_measure(std::span<const cplx>(scaled), g, 2.0 * t).exceed_count ==
          exceedance_measure(std::span<const cplx>(vals), g, t).exceed_count);
  }
}

TEST_CASE("refinement stability on the linear example") {
  for (std::int64_t n : {500, 1000, 2000}) {
    const auto g = SampleGrid::make(0.0, 1.0, n);
    const auto g2 = SampleGrid::make(0.0, 1.0, 2 * n);
    std::vector<double> s, s2;
    for (double x : g.points()) s.push_back(x);
    for (double x : g2.points()) s2.push_back(x);
    const double m1 = exceedance_measure(std::span<const double>(s), g, 0.5).estimated_measure;
    const double m2 = exceedance_measure(std::span<const double>(s2), g2, 0.5).estimated_measure;
    CHECK(std::abs(m1 - m2) <= 2.0 * g.step());
  }
}

TEST_CASE("report json and csv") {
  const auto g = SampleGrid::circle(8);
  std::vector<cplx> s(8, cplx(0.5));
  s[3] = 2.0;
  const auto r = exceedance_measure(std::span<const cplx>(s), g, 1.0);
  CHECK(exceedance_from_json(nlohmann::json::parse(to_json(r).dump())) == r);
  std::ostringstream os;
  write_exceedance_csv(os, g, s, 1.0);
  const std::string csv = os.str();
  CHECK(csv.rfind("x,abs,exceeds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

}  // TEST_SUITE
