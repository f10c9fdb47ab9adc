#include "nhs/gridmeasure.hpp"

#include <cmath>
#include <ostream>

#include "nhs/errors.hpp"

namespace nhs {

namespace {

ExceedanceReport finish(const SampleGrid& g, double t, std::int64_t n) {
  ExceedanceReport r;
  r.threshold = t;
  r.a = g.a;
  r.b = g.b;
  r.exceed_count = n;
  r.grid_count = g.count;
  r.estimated_measure = static_cast<double>(n) * (g.b - g.a) / static_cast<double>(g.count);
  return r;
}

void check(std::size_t len, const SampleGrid& g, double t) {
  if (static_cast<std::int64_t>(len) != g.count)
    throw InputContractError("sample count does not match the grid");
  if (!(t >= 0.0)) throw InputContractError("threshold must be >= 0");
}

}  // namespace

ExceedanceReport exceedance_measure(std::span<const double> samples, const SampleGrid& g, double t) {
  check(samples.size(), g, t);
  std::int64_t n = 0;
  for (double s : samples) n += std::abs(s) >= t;
  return finish(g, t, n);
}

ExceedanceReport exceedance_measure(std::span<const cplx> samples, const SampleGrid& g, double t) {
  check(samples.size(), g, t);
  std::int64_t n = 0;
  for (const cplx& s : samples) n += std::abs(s) >= t;
  return finish(g, t, n);
}

ExceedanceReport exceedance_of_difference(const TrigPoly& p, std::span<const cplx> target,
                                          const SampleGrid& g, double t) {
  check(target.size(), g, t);
  std::vector<cplx> v = evaluate(p, g);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= target[j];
  return exceedance_measure(std::span<const cplx>(v), g, t);
}

nlohmann::json to_json(const ExceedanceReport& r) {
  return {{"threshold", r.threshold},         {"window", {r.a, r.b}},
          {"estimated_measure", r.estimated_measure}, {"exceed_count", r.exceed_count},
          {"grid_count", r.grid_count}};
}

ExceedanceReport exceedance_from_json(const nlohmann::json& j) {
  ExceedanceReport r;
  r.threshold = j.at("threshold").get<double>();
  r.a = j.at("window").at(0).get<double>();
  r.b = j.at("window").at(1).get<double>();
  r.estimated_measure = j.at("estimated_measure").get<double>();
  r.exceed_count = j.at("exceed_count").get<std::int64_t>();
  r.grid_count = j.at("grid_count").get<std::int64_t>();
  return r;
}

void write_exceedance_csv(std::ostream& os, const SampleGrid& g, std::span<const cplx> samples, double t) {
  check(samples.size(), g, t);
  os << "x,abs,exceeds\n";
  os.precision(17);
  for (std::int64_t j = 0; j < g.count; ++j) {
    const double m = std::abs(samples[static_cast<std::size_t>(j)]);
    os << g.point(j) << ',' << m << ',' << (m >= t ? 1 : 0) << '\n';
  }
}

}  // namespace nhs
