#include "nhs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nhs/errors.hpp"

namespace nhs {

namespace {

using i128 = __int128;
constexpr i128 kIndexLimit = std::numeric_limits<std::int64_t>::max() / 4;

i128 ceil_eta(double eta) {
  if (!std::isfinite(eta) || eta < 0.0 || eta > 1e15) throw PlanOverflow("eta out of the integer range");
  return static_cast<i128>(std::ceil(eta));
}

std::int64_t checked(i128 v, const char* what) {
  if (v > kIndexLimit || v < -kIndexLimit) throw PlanOverflow(std::string(what) + " overflows the index range");
  return static_cast<std::int64_t>(v);
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double decay_max(const LayerRecord& rec, const RhoRule& rho) {
  double m = 0.0;
  const auto lo = static_cast<std::int64_t>(ceil_eta(rec.eta_prev));
  const auto hi = static_cast<std::int64_t>(ceil_eta(rec.eta_l)) + 1;
  for (std::int64_t k = lo; k <= hi; ++k) m = std::max(m, std::abs(rho(k)));
  return m;
}

}  // namespace

const LayerRecord& SpectrumPlan::layer(std::int64_t l) const {
  if (l < 1 || l > l_max()) throw OutOfMaterializedRange("layer " + std::to_string(l) + " is not in the plan");
  return layers[static_cast<std::size_t>(l - 1)];
}

std::int64_t SpectrumPlan::materialized_max() const {
  i128 m = 0;
  for (const LayerRecord& r : layers)
    m = std::max(m, static_cast<i128>(r.d_l) * r.b_l + ceil_eta(r.eta_l));
  return checked(m, "materialized range");
}

double compute_epsilon(std::int64_t l, double max_a_norm) {
  if (l < 1 || !(max_a_norm > 0.0)) throw InputContractError("compute_epsilon needs l >= 1 and a positive A-norm");
  const double ld = static_cast<double>(l);
  return 1.0 / (2.0 * ld * ld * max_a_norm);
}

double compute_epsilon(std::int64_t l, const BasisLayer& layer) { return compute_epsilon(l, layer.max_a_norm); }

std::int64_t compute_d(std::int64_t l, double epsilon_l, KornerRegistry& registry) {
  const double ld = static_cast<double>(l);
  return registry.degree_for(epsilon_l, 1.0 / (ld * ld * ld));
}

std::int64_t compute_b(std::int64_t prev_b, std::int64_t prev_d, double eta_prev, double eta_l) {
  if (prev_b < 1 || prev_d < 1) throw InputContractError("compute_b needs positive prev_b and prev_d");
  const i128 v = static_cast<i128>(prev_b) * prev_d + ceil_eta(eta_prev) + 2 * ceil_eta(eta_l) + 1;
  return checked(v, "b_l");
}

SpectrumPlan build_plan(const std::vector<BasisLayer>& layers, const RhoRule& rho,
                        KornerRegistry& registry, const SpectrumConfig& cfg) {
  SpectrumPlan plan;
  plan.rho = rho;
  plan.config = cfg;
  plan.korner_profile = registry.config().profile;
  plan.korner_seed = registry.config().seed;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].l != static_cast<std::int64_t>(i + 1)) throw InputContractError("layers must be 1..L in order");
    if (!(layers[i].rho == rho)) throw InputContractError("layer built with a different rho");
  }
  std::vector<double> eps;
  for (const BasisLayer& L : layers) {
    eps.push_back(compute_epsilon(L.l, L));
    const double ld = static_cast<double>(L.l);
    registry.entry(eps.back(), 1.0 / (ld * ld * ld));
  }
  std::int64_t prev_b = cfg.b0, prev_d = cfg.d0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    LayerRecord rec;
    rec.l = layers[i].l;
    rec.eta_l = layers[i].eta_l;
    rec.eta_prev = layers[i].eta_prev;
    rec.max_a_norm = layers[i].max_a_norm;
    rec.epsilon_l = eps[i];
    rec.d_l = compute_d(rec.l, rec.epsilon_l, registry);
    rec.b_l = compute_b(prev_b, prev_d, rec.eta_prev, rec.eta_l);
    prev_b = rec.b_l;
    prev_d = rec.d_l;
    plan.layers.push_back(rec);
  }
  (void)plan.materialized_max();
  return plan;
}

bool in_layer(std::int64_t n, const LayerRecord& rec, const RhoRule& rho) {
  const double a = std::abs(rho.sigma(n));
  if (a > rec.eta_l) return false;
  return rec.l == 1 ? a >= rec.eta_prev : a > rec.eta_prev;
}

std::vector<std::int64_t> layer_indices(std::int64_t l, const SpectrumPlan& plan) {
  const LayerRecord& rec = plan.layer(l);
  const auto top = static_cast<std::int64_t>(ceil_eta(rec.eta_l)) + 1;
  std::vector<std::int64_t> out;
  for (std::int64_t n = -top; n <= top; ++n)
    if (in_layer(n, rec, plan.rho)) out.push_back(n);
  return out;
}

LambdaValue lambda_of(std::int64_t m, const SpectrumPlan& plan) {
  if (m > plan.materialized_max() || m < -plan.materialized_max())
    throw OutOfMaterializedRange("index " + std::to_string(m) + " is beyond the materialized plan");
  LambdaValue v;
  v.m = m;
  for (const LayerRecord& rec : plan.layers) {
    const i128 b = rec.b_l;
    const i128 s = floor_div(2 * static_cast<i128>(m) + b, 2 * b);
    if (s == 0 || s > rec.d_l || s < -rec.d_l) continue;
    const auto n = static_cast<std::int64_t>(m - s * b);
    if (!in_layer(n, rec, plan.rho)) continue;
    v.mapped = true;
    v.l = rec.l;
    v.s = static_cast<std::int64_t>(s);
    v.n = n;
    v.k = n < 0 ? -n : n;
    v.rho = plan.rho(v.k);
    return v;
  }
  v.k = m < 0 ? -m : m;
  v.rho = plan.rho(v.k);
  return v;
}

std::vector<std::int64_t> block_indices(std::int64_t l, std::int64_t s, const SpectrumPlan& plan) {
  const LayerRecord& rec = plan.layer(l);
  if (s == 0 || s > rec.d_l || s < -rec.d_l) throw InputContractError("block index s must satisfy 1 <= |s| <= d_l");
  std::vector<std::int64_t> out;
  for (std::int64_t n : layer_indices(l, plan)) out.push_back(checked(static_cast<i128>(n) + static_cast<i128>(s) * rec.b_l, "block index"));
  return out;
}

std::vector<double> block_frequencies(std::int64_t l, std::int64_t s, const SpectrumPlan& plan) {
  const LayerRecord& rec = plan.layer(l);
  std::vector<double> out;
  for (std::int64_t m : block_indices(l, s, plan)) {
    const std::int64_t n = m - s * rec.b_l;
    out.push_back(static_cast<double>(m) + plan.rho(n < 0 ? -n : n));
  }
  return out;
}

std::vector<std::int64_t> dumped_indices(const SpectrumPlan& plan) {
  std::vector<std::int64_t> out;
  for (const LayerRecord& rec : plan.layers) {
    std::vector<std::int64_t> ss;
    for (std::int64_t s = 1; s <= std::min(rec.d_l, plan.config.dump_blocks); ++s) ss.push_back(s);
    ss.push_back(rec.d_l);
    for (std::int64_t s : ss)
      for (std::int64_t sign : {-1, 1}) {
        auto bi = block_indices(rec.l, sign * s, plan);
        out.insert(out.end(), bi.begin(), bi.end());
      }
  }
  const std::int64_t f = std::min(plan.config.dump_fallback, plan.materialized_max());
  for (std::int64_t m = -f; m <= f; ++m) out.push_back(m);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PlanChecks verify_plan(const SpectrumPlan& plan) {
  PlanChecks c;
  std::int64_t prev_b = plan.config.b0, prev_d = plan.config.d0;
  double prev_eta = 0.0;
  for (const LayerRecord& rec : plan.layers) {
    const double ld = static_cast<double>(rec.l);
    c.eps_def = c.eps_def && rec.epsilon_l * rec.max_a_norm < 1.0 / (ld * ld);
    const long double rhs = static_cast<long double>(prev_b) * prev_d + rec.eta_prev + 2.0L * rec.eta_l;
    c.b_recurrence = c.b_recurrence && rec.eta_prev == prev_eta &&
                     rec.b_l == compute_b(prev_b, prev_d, rec.eta_prev, rec.eta_l) &&
                     static_cast<long double>(rec.b_l) > rhs;
    prev_b = rec.b_l;
    prev_d = rec.d_l;
    prev_eta = rec.eta_l;
  }

  // Block (l, s) lies inside [s b_l - ceil(eta_l), s b_l + ceil(eta_l)].
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const LayerRecord& r = plan.layers[i];
    const i128 ce = ceil_eta(r.eta_l);
    if (!(static_cast<i128>(r.b_l) > 2 * ce)) c.disjoint = false;
    if (i + 1 < plan.layers.size()) {
      const LayerRecord& q = plan.layers[i + 1];
      if (!(static_cast<i128>(q.b_l) - ceil_eta(q.eta_l) > static_cast<i128>(r.d_l) * r.b_l + ce)) c.disjoint = false;
    }
  }
  i128 blocks = 0;
  for (const LayerRecord& r : plan.layers) blocks += 2 * static_cast<i128>(r.d_l);
  if (blocks <= 2'000'000) {
    std::vector<std::pair<i128, i128>> iv;
    for (const LayerRecord& r : plan.layers) {
      const i128 ce = ceil_eta(r.eta_l);
      for (std::int64_t s = 1; s <= r.d_l; ++s)
        for (i128 sign : {-1, 1}) iv.emplace_back(sign * s * r.b_l - ce, sign * s * r.b_l + ce);
    }
    std::sort(iv.begin(), iv.end());
    for (std::size_t i = 1; i < iv.size(); ++i)
      if (!(iv[i - 1].second < iv[i].first)) c.disjoint = false;
    c.disjoint_enumerated = true;
  }

  std::vector<double> dmax;
  for (const LayerRecord& r : plan.layers) dmax.push_back(decay_max(r, plan.rho));
  for (std::int64_t m : dumped_indices(plan)) {
    const LambdaValue v = lambda_of(m, plan);
    ++c.checked_indices;
    const std::int64_t k = v.mapped ? (v.n < 0 ? -v.n : v.n) : (m < 0 ? -m : m);
    if (v.k != k || v.rho != plan.rho(k)) c.lambda_membership = false;
    if (v.mapped) {
      const auto& rec = plan.layer(v.l);
      if (m != v.n + v.s * rec.b_l) c.lambda_membership = false;
      if (std::abs(v.rho) > dmax[static_cast<std::size_t>(v.l - 1)]) c.decay_bound = false;
    }
  }

  for (const LayerRecord& r : plan.layers) {
    std::map<std::int64_t, std::int64_t> count;
    for (std::int64_t n : layer_indices(r.l, plan)) count[n < 0 ? -n : n] += 2 * r.d_l;
    for (auto& [k, cnt] : count)
      for (std::int64_t m : {k, -k}) {
        if (k == 0 && m == -k) continue;
        if (!lambda_of(m, plan).mapped) ++cnt;
      }
    for (const auto& [k, cnt] : count)
      if (cnt > 4 * r.d_l + 2) c.repetition_bound = false;
  }
  return c;
}

nlohmann::json to_json(const SpectrumPlan& plan) {
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerRecord& r : plan.layers)
    layers.push_back({{"l", r.l},
                      {"eta_l", r.eta_l},
                      {"eta_prev", r.eta_prev},
                      {"max_a_norm", r.max_a_norm},
                      {"epsilon_l", r.epsilon_l},
                      {"d_l", r.d_l},
                      {"b_l", r.b_l}});
  nlohmann::json lm = nlohmann::json::array();
  for (std::int64_t m : dumped_indices(plan)) {
    const LambdaValue v = lambda_of(m, plan);
    nlohmann::json e{{"m", m}, {"lambda", v.value()}, {"k", v.k}, {"mapped", v.mapped}};
    if (v.mapped) {
      e["l"] = v.l;
      e["s"] = v.s;
      e["n"] = v.n;
    }
    lm.push_back(std::move(e));
  }
  return {{"rho", to_json(plan.rho)},
          {"b0", plan.config.b0},
          {"d0", plan.config.d0},
          {"dump_blocks", plan.config.dump_blocks},
          {"dump_fallback", plan.config.dump_fallback},
          {"fallback", plan.fallback},
          {"korner", {{"profile", plan.korner_profile}, {"seed", plan.korner_seed}}},
          {"layers", layers},
          {"lambda_map", lm}};
}

SpectrumPlan spectrum_plan_from_json(const nlohmann::json& j) {
  SpectrumPlan p;
  p.rho = rho_from_json(j.at("rho"));
  p.config.b0 = j.at("b0").get<std::int64_t>();
  p.config.d0 = j.at("d0").get<std::int64_t>();
  p.config.dump_blocks = j.value("dump_blocks", p.config.dump_blocks);
  p.config.dump_fallback = j.value("dump_fallback", p.config.dump_fallback);
  p.fallback = j.at("fallback").get<std::string>();
  if (p.fallback != "sigma") throw InputContractError("unknown lambda fallback rule");
  p.korner_profile = j.at("korner").at("profile").get<std::string>();
  p.korner_seed = j.at("korner").at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("layers")) {
    LayerRecord r;
    r.l = e.at("l").get<std::int64_t>();
    r.eta_l = e.at("eta_l").get<double>();
    r.eta_prev = e.at("eta_prev").get<double>();
    r.max_a_norm = e.at("max_a_norm").get<double>();
    r.epsilon_l = e.at("epsilon_l").get<double>();
    r.d_l = e.at("d_l").get<std::int64_t>();
    r.b_l = e.at("b_l").get<std::int64_t>();
    p.layers.push_back(r);
  }
  (void)p.materialized_max();
  return p;
}

nlohmann::json to_json(const PlanChecks& c) {
  return {{"eps_def", c.eps_def},
          {"b_recurrence", c.b_recurrence},
          {"disjoint", c.disjoint},
          {"disjoint_enumerated", c.disjoint_enumerated},
          {"lambda_membership", c.lambda_membership},
          {"decay_bound", c.decay_bound},
          {"repetition_bound", c.repetition_bound},
          {"checked_indices", c.checked_indices},
          {"all", c.all()}};
}

}  // namespace nhs
