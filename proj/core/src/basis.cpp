#include "nhs/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace nhs {

const BasisEntry& BasisLayer::at(std::int64_t r) const {
  if (r < -l || r > l) throw InputContractError("basis index r out of range");
  return entries.at(static_cast<std::size_t>(r + l));
}

LayerBuildFailed::LayerBuildFailed(std::int64_t l_, std::int64_t r_, ApproxReport best_, ExceedanceReport verify_)
    : Error("layer " + std::to_string(l_) + " failed at r = " + std::to_string(r_) +
            " (best exceedance " + std::to_string(verify_.estimated_measure) + ")"),
      l(l_),
      r(r_),
      best(std::move(best_)),
      verify(verify_) {}

namespace {

std::vector<cplx> exp_samples(double freq, const SampleGrid& g) {
  std::vector<cplx> t(static_cast<std::size_t>(g.count));
  for (std::int64_t j = 0; j < g.count; ++j) {
    const double ph = freq * g.point(j);
    t[static_cast<std::size_t>(j)] = cplx(std::cos(ph), std::sin(ph));
  }
  return t;
}

std::int64_t floor_above(const RhoRule& rho, double deg) {
  auto f = static_cast<std::int64_t>(std::ceil(deg));
  while (std::abs(rho.sigma(f + 1)) <= deg || std::abs(rho.sigma(-(f + 1))) <= deg) ++f;
  return f;
}

}  // namespace

BasisLayer build_layer(std::int64_t l, const BasisLayer* prev, const RhoRule& rho,
                       const BasisConfig& cfg, const BasisProgress& progress) {
  if (l < 1) throw InputContractError("layer index must be >= 1");
  if (l == 1 ? prev != nullptr : (prev == nullptr || prev->l != l - 1))
    throw InputContractError("build_layer needs the previous layer");

  BasisLayer layer;
  layer.l = l;
  layer.rho = rho;
  layer.eta_prev = prev ? prev->eta_l : 0.0;
  layer.relaxation = cfg.relaxation;
  const double ld = static_cast<double>(l);
  layer.threshold = 1.0 / (ld * ld);
  layer.measure_bound = cfg.relaxation / (ld * ld * ld);

  const SampleGrid vgrid = SampleGrid::window(ld, cfg.verify_per_2pi);
  double running = layer.eta_prev;

  for (std::int64_t r = -l; r <= l; ++r) {
    const double fr = rho.sigma(r);
    const std::vector<cplx> vtarget = exp_samples(fr, vgrid);
    const std::int64_t fl = floor_above(rho, running);
    std::int64_t cap = fl + cfg.initial_extra;
    std::optional<BasisEntry> best;
    double stagnant_ref = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    bool ok = false;
    while (true) {
      cap = std::min(cap, std::max(cfg.cap_budget, fl + 1));
      const auto count = std::max(cfg.min_solve_per_2pi * l, cfg.solve_points_per_unit * cap * l);
      const SampleGrid sgrid = SampleGrid::make(-ld * std::numbers::pi, ld * std::numbers::pi, count);
      const FrequencyPool pool = materialize_pool(rho, fl, cap);
      const std::vector<cplx> starget = exp_samples(fr, sgrid);
      BasisEntry e;
      e.r = r;
      e.report = approximate_in_measure(starget, sgrid, pool, layer.threshold, layer.measure_bound, cfg.approx);
      e.poly = to_trigpoly(e.report, rho);
      e.verify = exceedance_of_difference(e.poly, vtarget, vgrid, layer.threshold);
      e.a_norm = a_norm(e.poly);
      e.degree = degree(e.poly);
      if (progress) progress(l, r, cap, e.verify.estimated_measure);
      const double v = e.verify.estimated_measure;
      if (!best || v < best->verify.estimated_measure) best = e;
      if (e.report.converged && v < layer.measure_bound) {
        ok = true;
        break;
      }
      if (v < stagnant_ref * 0.99) {
        stagnant_ref = v;
        stagnant = 0;
      } else if (++stagnant >= cfg.stagnation_limit) {
        break;
      }
      if (cap >= cfg.cap_budget) break;
      cap = fl + 2 * (cap - fl);
    }
    if (!ok) throw LayerBuildFailed(l, r, best->report, best->verify);
    running = std::max(running, best->degree);
    layer.entries.push_back(std::move(*best));
  }
  layer.eta_l = layer.entries.back().degree;
  layer.max_a_norm = layer_a_norm_max(layer);
  return layer;
}

double layer_a_norm_max(const BasisLayer& layer) {
  double m = 0.0;
  for (const BasisEntry& e : layer.entries) m = std::max(m, a_norm(e.poly));
  return m;
}

nlohmann::json to_json(const BasisLayer& layer) {
  nlohmann::json polys = nlohmann::json::array();
  for (const BasisEntry& e : layer.entries)
    polys.push_back({{"r", e.r},
                     {"a_norm", e.a_norm},
                     {"degree", e.degree},
                     {"verify", to_json(e.verify)},
                     {"report", to_json(e.report)},
                     {"poly", to_json(e.poly)}});
  return {{"l", layer.l},
          {"rho", to_json(layer.rho)},
          {"eta_l", layer.eta_l},
          {"eta_prev", layer.eta_prev},
          {"max_a_norm", layer.max_a_norm},
          {"relaxation", layer.relaxation},
          {"threshold", layer.threshold},
          {"measure_bound", layer.measure_bound},
          {"polys", polys}};
}

BasisLayer basis_layer_from_json(const nlohmann::json& j) {
  BasisLayer layer;
  layer.l = j.at("l").get<std::int64_t>();
  layer.rho = rho_from_json(j.at("rho"));
  layer.eta_l = j.at("eta_l").get<double>();
  layer.eta_prev = j.at("eta_prev").get<double>();
  layer.max_a_norm = j.at("max_a_norm").get<double>();
  layer.relaxation = j.at("relaxation").get<double>();
  layer.threshold = j.at("threshold").get<double>();
  layer.measure_bound = j.at("measure_bound").get<double>();
  for (const auto& p : j.at("polys")) {
    BasisEntry e;
    e.r = p.at("r").get<std::int64_t>();
    e.a_norm = p.at("a_norm").get<double>();
    e.degree = p.at("degree").get<double>();
    e.verify = exceedance_from_json(p.at("verify"));
    e.report = approx_report_from_json(p.at("report"));
    e.poly = trigpoly_from_json(p.at("poly"));
    layer.entries.push_back(std::move(e));
  }
  if (static_cast<std::int64_t>(layer.entries.size()) != 2 * layer.l + 1)
    throw InputContractError("basis layer JSON must hold 2l+1 polynomials");
  return layer;
}

nlohmann::json to_json(const BasisConfig& c) {
  return {{"relaxation", c.relaxation},
          {"cap_budget", c.cap_budget},
          {"initial_extra", c.initial_extra},
          {"solve_points_per_unit", c.solve_points_per_unit},
          {"min_solve_per_2pi", c.min_solve_per_2pi},
          {"verify_per_2pi", c.verify_per_2pi},
          {"stagnation_limit", c.stagnation_limit},
          {"approx", to_json(c.approx)}};
}

BasisConfig basis_config_from_json(const nlohmann::json& j) {
  BasisConfig c;
  c.relaxation = j.value("relaxation", c.relaxation);
  c.cap_budget = j.value("cap_budget", c.cap_budget);
  c.initial_extra = j.value("initial_extra", c.initial_extra);
  c.solve_points_per_unit = j.value("solve_points_per_unit", c.solve_points_per_unit);
  c.min_solve_per_2pi = j.value("min_solve_per_2pi", c.min_solve_per_2pi);
  c.verify_per_2pi = j.value("verify_per_2pi", c.verify_per_2pi);
  c.stagnation_limit = j.value("stagnation_limit", c.stagnation_limit);
  if (j.contains("approx")) c.approx = approx_config_from_json(j.at("approx"));
  return c;
}

}  // namespace nhs
