#include "nhs/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nhs/errors.hpp"

namespace nhs {

double DriverConfig::window_scale(std::int64_t N) const {
  return profile == kProfileDesk ? static_cast<double>(N) : 1.0;
}

PipelineContext::PipelineContext(RhoRule rho, BasisConfig basis, KornerConfig korner, SpectrumConfig spectrum)
    : rho_(std::move(rho)), basis_(std::move(basis)), spectrum_(spectrum), registry_(std::move(korner)) {}

const BasisLayer& PipelineContext::layer(std::int64_t l) {
  if (l < 1) throw InputContractError("layer index must be >= 1");
  while (static_cast<std::int64_t>(layers_.size()) < l) {
    const auto next = static_cast<std::int64_t>(layers_.size()) + 1;
    layers_.push_back(build_layer(next, layers_.empty() ? nullptr : &layers_.back(), rho_, basis_, progress_));
  }
  return layers_[static_cast<std::size_t>(l - 1)];
}

const SpectrumPlan& PipelineContext::plan_through(std::int64_t l) {
  if (plan_ && plan_->l_max() >= l) return *plan_;
  (void)layer(l);
  plan_ = build_plan(layers_, rho_, registry_, spectrum_);
  return *plan_;
}

void PipelineContext::adopt_layers(std::vector<BasisLayer> layers) {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].l != static_cast<std::int64_t>(i + 1) || !(layers[i].rho == rho_))
      throw InputContractError("adopted layers must be 1..L built with the context's rho");
  layers_ = std::move(layers);
  if (plan_ && plan_->l_max() > static_cast<std::int64_t>(layers_.size())) plan_.reset();
}

void PipelineContext::adopt_plan(SpectrumPlan plan) {
  if (!(plan.rho == rho_)) throw InputContractError("adopted plan uses a different rho");
  plan_ = std::move(plan);
}

bool StepReport::all_checks() const {
  return std::all_of(bound_checks.begin(), bound_checks.end(), [](const auto& kv) { return kv.second; });
}

StepFailed::StepFailed(std::int64_t N_, std::string stage_, const std::string& what, nlohmann::json detail_)
    : Error("step " + std::to_string(N_) + " failed in " + stage_ + ": " + what),
      N(N_),
      stage(std::move(stage_)),
      detail(std::move(detail_)) {}

double delta_schedule(std::int64_t N, const DriverConfig& cfg, KornerRegistry& registry) {
  if (N < 1) throw InputContractError("delta_schedule needs N >= 1");
  const double nd = static_cast<double>(N);
  if (cfg.profile == kProfileDesk) return cfg.desk_delta / nd;
  if (cfg.profile != kProfileFaithful) throw InputContractError("unknown driver profile: " + cfg.profile);
  const double next = nd + 1.0;
  return cfg.relaxation / (nd * registry.u_bound_for_delta(1.0 / (next * next * next)));
}

TrigPoly partial_sum(const RepresentationState& state, std::int64_t N) {
  if (N < 0 || N > state.N) throw InputContractError("partial_sum index out of range");
  std::vector<Term> t;
  for (std::int64_t i = 0; i < N; ++i) {
    const auto& h = state.h_polys[static_cast<std::size_t>(i)].terms();
    t.insert(t.end(), h.begin(), h.end());
  }
  return TrigPoly(std::move(t));
}

TrigPoly reconstruct_sum(const RepresentationState& state, const SpectrumPlan& plan) {
  std::vector<Term> t;
  t.reserve(state.coefficients.size());
  for (const auto& [m, c] : state.coefficients) t.push_back({lambda_of(m, plan).value(), c});
  return TrigPoly(std::move(t));
}

namespace {

std::vector<cplx> minus(std::vector<cplx> a, const std::vector<cplx>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

std::vector<cplx> eval_or_zero(const TrigPoly& p, const SampleGrid& g) {
  if (p.empty()) return std::vector<cplx>(static_cast<std::size_t>(g.count), cplx(0.0, 0.0));
  return evaluate(p, g);
}

double measure_diff(const TrigPoly& p, const TrigPoly& q, const SampleGrid& g, double t) {
  const std::vector<cplx> d = minus(eval_or_zero(p, g), eval_or_zero(q, g));
  return exceedance_measure(std::span<const cplx>(d), g, t).estimated_measure;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t k = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  if (v.size() % 2 == 1) return v[k];
  const double hi = v[k];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return 0.5 * (v[k - 1] + hi);
}

template <class F>
auto guarded(std::int64_t N, F&& f) {
  try {
    return f();
  } catch (const LayerBuildFailed& e) {
    throw StepFailed(N, "layer", e.what(),
                     {{"l", e.l}, {"r", e.r}, {"verify", to_json(e.verify)},
                      {"achieved_exceedance", e.best.achieved_exceedance}, {"pool_cap_used", e.best.pool_cap_used}});
  } catch (const GenerationFailed& e) {
    throw StepFailed(N, "generation", e.what(), nlohmann::json::object());
  } catch (const PlanOverflow& e) {
    throw StepFailed(N, "plan", e.what(), nlohmann::json::object());
  }
}

}  // namespace

RepresentationState step(const RepresentationState& state, const Target& f, PipelineContext& ctx,
                         const DriverConfig& cfg) {
  const std::int64_t N = state.N + 1;
  const double nd = static_cast<double>(N);
  StepReport rep;
  rep.N = N;
  rep.profile = cfg.profile;
  rep.delta_N = guarded(N, [&] { return delta_schedule(N, cfg, ctx.registry()); });
  rep.window_scale = cfg.window_scale(N);
  const double delta = rep.delta_N;
  rep.bound_Gg = rep.window_scale / (nd * nd);
  rep.bound_HG = 3.0 * rep.window_scale / (nd * nd);
  rep.bound_KH = rep.window_scale / (nd * nd);
  rep.bound_fS = 5.0 * rep.window_scale / (nd * nd);

  const SampleGrid vgrid = SampleGrid::window(nd, cfg.verify_per_2pi);
  const TrigPoly s_prev = partial_sum(state, state.N);
  const std::vector<cplx> f_v = f.samples(vgrid);
  const std::vector<cplx> F_v = minus(f_v, eval_or_zero(s_prev, vgrid));

  // (i)-(ii): G_N, growing the pool until the solve and the verification grid agree.
  TrigPoly G;
  std::int64_t M = std::max<std::int64_t>(cfg.m_start, 2);
  while (true) {
    const std::int64_t cap = M - 1;
    const FrequencyPool pool = materialize_pool(ctx.rho(), 0, cap);
    const auto count = std::max(cfg.solve_min_per_2pi * N, cfg.solve_points_per_unit * cap * N);
    const SampleGrid sgrid = SampleGrid::make(-nd * std::numbers::pi, nd * std::numbers::pi, count);
    const std::vector<cplx> F_s = minus(f.samples(sgrid), eval_or_zero(s_prev, sgrid));
    rep.g_report = approximate_in_measure(F_s, sgrid, pool, delta, rep.bound_Gg, cfg.approx);
    G = to_trigpoly(rep.g_report, ctx.rho());
    rep.exceed_Gg = exceedance_of_difference(G, F_v, vgrid, delta).estimated_measure;
    if (rep.g_report.converged && rep.exceed_Gg < rep.bound_Gg) break;
    if (M >= cfg.m_budget)
      throw StepFailed(N, "solve", "G_N missed the measure bound within the pool budget",
                       {{"M", M}, {"exceed_Gg", rep.exceed_Gg}, {"bound", rep.bound_Gg},
                        {"achieved_exceedance", rep.g_report.achieved_exceedance}});
    M *= 2;
  }
  rep.M_N = rep.g_report.coefficients.empty() ? 0 : M;
  rep.g_a_norm = coefficient_a_norm(rep.g_report);

  // (iii)
  const double lower = std::max({nd, 1.0 / delta, static_cast<double>(rep.M_N), rep.g_a_norm,
                                 static_cast<double>(state.l_prev)});
  rep.l_N = static_cast<std::int64_t>(std::floor(lower)) + 1;
  const double lnd = static_cast<double>(rep.l_N);

  TrigPoly Q, H;
  std::map<std::int64_t, cplx> h_coef;
  bool containment = true, disjoint = true;
  if (!rep.g_report.coefficients.empty()) {
    rep.materialized = true;
    // (iv)-(vi)
    const SpectrumPlan& plan = guarded(N, [&]() -> const SpectrumPlan& { return ctx.plan_through(rep.l_N); });
    const BasisLayer& layer = ctx.layer(rep.l_N);
    const LayerRecord& rec = plan.layer(rep.l_N);
    rep.layer_max_a_norm = layer.max_a_norm;
    rep.epsilon_l = rec.epsilon_l;
    rep.b_l = rec.b_l;
    rep.d_l = rec.d_l;
    std::map<std::int64_t, cplx> q_coef;
    for (const auto& [r, a] : rep.g_report.coefficients)
      for (const auto& [n, c] : layer.at(r).report.coefficients) q_coef[n] += a * c;
    std::vector<Term> qt;
    for (const auto& [n, c] : q_coef) qt.push_back({ctx.rho().sigma(n), c});
    Q = TrigPoly(std::move(qt));
    const auto& kentry = guarded(N, [&]() -> const KornerRegistry::Entry& {
      return ctx.registry().entry(rec.epsilon_l, 1.0 / (nd * nd * nd));
    });
    rep.p_u_norm = kentry.cert.u_norm_bound;
    for (const auto& [n, qn] : q_coef)
      for (const Term& pt : kentry.poly.terms()) {
        const auto s = static_cast<std::int64_t>(std::llround(pt.freq));
        h_coef[n + s * rec.b_l] += qn * pt.coef;
      }
    std::vector<Term> ht;
    for (const auto& [m, c] : h_coef) {
      const LambdaValue v = lambda_of(m, plan);
      if (!v.mapped || v.l != rep.l_N || v.s == 0 || std::abs(v.s) > rec.d_l) containment = false;
      if (state.coefficients.count(m)) disjoint = false;
      ht.push_back({v.value(), c});
    }
    H = TrigPoly(std::move(ht));
    rep.h_terms = static_cast<std::int64_t>(H.size());
  }
  rep.q_a_norm = a_norm(Q);
  rep.exceed_HG = measure_diff(Q, G, vgrid, delta);
  rep.exceed_KH_window = measure_diff(H, Q, vgrid, delta);
  const TrigPoly s_new = add(s_prev, H);
  {
    const std::vector<cplx> d = minus(f_v, eval_or_zero(s_new, vgrid));
    rep.exceed_fS = exceedance_measure(std::span<const cplx>(d), vgrid, 3.0 * delta).estimated_measure;
  }
  if (!H.empty()) {
    const std::vector<double> hs = maximal_function(H, SampleGrid::window(nd, cfg.hstar_per_2pi));
    rep.h_star_max = *std::max_element(hs.begin(), hs.end());
    rep.h_star_median = median(hs);
  }
  rep.bound_first_summand = 2.0 * rep.epsilon_l * rep.q_a_norm;

  auto& bc = rep.bound_checks;
  bc["gg_measure"] = rep.exceed_Gg < rep.bound_Gg;
  bc["hg_arithmetic"] = (2.0 * static_cast<double>(rep.M_N) + 1.0) / (lnd * lnd * lnd) < 3.0 / (nd * nd);
  bc["hg_measure"] = rep.exceed_HG < rep.bound_HG;
  bc["kh_chain"] = rep.g_a_norm * rep.layer_max_a_norm * rep.epsilon_l <= 1.0 / lnd && 1.0 / lnd <= delta;
  bc["kh_measure"] = rep.exceed_KH_window < rep.bound_KH;
  bc["fs_measure"] = rep.exceed_fS < rep.bound_fS;
  bc["qna_to_gna"] = rep.q_a_norm <= rep.g_a_norm * rep.layer_max_a_norm + 1e-9;
  bc["first_summand"] = rep.bound_first_summand < 1.0 / nd;
  bc["spectrum_containment"] = containment;
  bc["block_disjointness"] = disjoint;
  bc["l_increasing"] = rep.l_N > state.l_prev;

  RepresentationState next = state;
  next.N = N;
  next.l_prev = rep.l_N;
  for (const auto& [m, c] : h_coef)
    if (c != cplx(0.0, 0.0)) next.coefficients[m] += c;
  next.step_coefficients.push_back(h_coef);
  next.h_polys.push_back(H);
  next.q_polys.push_back(Q);
  next.reports.push_back(std::move(rep));
  return next;
}

FsVerification verify_fS(const RepresentationState& state, const Target& f, std::int64_t N,
                         const DriverConfig& cfg) {
  if (N < 1 || N > state.N) throw InputContractError("verify_fS needs a completed step");
  const StepReport& rep = state.reports[static_cast<std::size_t>(N - 1)];
  const double nd = static_cast<double>(N);
  const SampleGrid vgrid = SampleGrid::window(nd, cfg.verify_per_2pi);
  const std::vector<cplx> d = minus(f.samples(vgrid), eval_or_zero(partial_sum(state, N), vgrid));
  FsVerification v;
  v.report = exceedance_measure(std::span<const cplx>(d), vgrid, 3.0 * rep.delta_N);
  v.bound = 5.0 * cfg.window_scale(N) / (nd * nd);
  v.passed = v.report.estimated_measure < v.bound;
  return v;
}

std::vector<DecayStats> maximal_decay(const RepresentationState& state, std::int64_t n_first,
                                      std::int64_t n_last, const DriverConfig& cfg) {
  if (n_first < 1 || n_last > state.N || n_first > n_last) throw InputContractError("maximal_decay range");
  std::vector<DecayStats> out;
  for (std::int64_t N = n_first; N <= n_last; ++N) {
    const auto i = static_cast<std::size_t>(N - 1);
    const StepReport& rep = state.reports[i];
    const SampleGrid g = SampleGrid::window(static_cast<double>(N), cfg.hstar_per_2pi);
    DecayStats d;
    d.N = N;
    d.first_summand = rep.bound_first_summand;
    d.first_summand_ok = d.first_summand < 1.0 / static_cast<double>(N);
    const TrigPoly& H = state.h_polys[i];
    if (!H.empty()) {
      std::vector<double> hs = maximal_function(H, g);
      const std::vector<cplx> q = evaluate(state.q_polys[i], g);
      d.split_slack = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < hs.size(); ++j) {
        const double second = std::abs(q[j]) * rep.p_u_norm;
        d.second_summand_max = std::max(d.second_summand_max, second);
        d.split_slack = std::max(d.split_slack, hs[j] - d.first_summand - second);
      }
      d.max = *std::max_element(hs.begin(), hs.end());
      d.median = median(hs);
      const auto k = static_cast<std::size_t>(0.9 * static_cast<double>(hs.size() - 1));
      std::nth_element(hs.begin(), hs.begin() + static_cast<std::ptrdiff_t>(k), hs.end());
      d.q90 = hs[k];
    }
    out.push_back(d);
  }
  return out;
}

RepresentationState run(const Target& f, std::int64_t N_max, PipelineContext& ctx, const DriverConfig& cfg) {
  if (N_max < 0) throw InputContractError("N_max must be >= 0");
  RepresentationState state;
  for (std::int64_t N = 1; N <= N_max; ++N) {
    try {
      state = step(state, f, ctx, cfg);
    } catch (StepFailed& e) {
      e.partial = std::make_shared<RepresentationState>(state);
      throw;
    }
  }
  return state;
}

nlohmann::json to_json(const StepReport& r) {
  return {{"N", r.N},
          {"profile", r.profile},
          {"delta_N", r.delta_N},
          {"window_scale", r.window_scale},
          {"M_N", r.M_N},
          {"l_N", r.l_N},
          {"g_a_norm", r.g_a_norm},
          {"q_a_norm", r.q_a_norm},
          {"layer_max_a_norm", r.layer_max_a_norm},
          {"epsilon_l", r.epsilon_l},
          {"b_l", r.b_l},
          {"d_l", r.d_l},
          {"p_u_norm", r.p_u_norm},
          {"materialized", r.materialized},
          {"h_terms", r.h_terms},
          {"exceed_Gg", r.exceed_Gg},
          {"exceed_HG", r.exceed_HG},
          {"exceed_KH_window", r.exceed_KH_window},
          {"exceed_fS", r.exceed_fS},
          {"bound_Gg", r.bound_Gg},
          {"bound_HG", r.bound_HG},
          {"bound_KH", r.bound_KH},
          {"bound_fS", r.bound_fS},
          {"h_star_max", r.h_star_max},
          {"h_star_median", r.h_star_median},
          {"bound_first_summand", r.bound_first_summand},
          {"bound_checks", r.bound_checks},
          {"g_report", to_json(r.g_report)}};
}

StepReport step_report_from_json(const nlohmann::json& j) {
  StepReport r;
  r.N = j.at("N").get<std::int64_t>();
  r.profile = j.at("profile").get<std::string>();
  r.delta_N = j.at("delta_N").get<double>();
  r.window_scale = j.at("window_scale").get<double>();
  r.M_N = j.at("M_N").get<std::int64_t>();
  r.l_N = j.at("l_N").get<std::int64_t>();
  r.g_a_norm = j.at("g_a_norm").get<double>();
  r.q_a_norm = j.at("q_a_norm").get<double>();
  r.layer_max_a_norm = j.at("layer_max_a_norm").get<double>();
  r.epsilon_l = j.at("epsilon_l").get<double>();
  r.b_l = j.at("b_l").get<std::int64_t>();
  r.d_l = j.at("d_l").get<std::int64_t>();
  r.p_u_norm = j.at("p_u_norm").get<double>();
  r.materialized = j.at("materialized").get<bool>();
  r.h_terms = j.at("h_terms").get<std::int64_t>();
  r.exceed_Gg = j.at("exceed_Gg").get<double>();
  r.exceed_HG = j.at("exceed_HG").get<double>();
  r.exceed_KH_window = j.at("exceed_KH_window").get<double>();
  r.exceed_fS = j.at("exceed_fS").get<double>();
  r.bound_Gg = j.at("bound_Gg").get<double>();
  r.bound_HG = j.at("bound_HG").get<double>();
  r.bound_KH = j.at("bound_KH").get<double>();
  r.bound_fS = j.at("bound_fS").get<double>();
  r.h_star_max = j.at("h_star_max").get<double>();
  r.h_star_median = j.at("h_star_median").get<double>();
  r.bound_first_summand = j.at("bound_first_summand").get<double>();
  r.bound_checks = j.at("bound_checks").get<std::map<std::string, bool>>();
  r.g_report = approx_report_from_json(j.at("g_report"));
  return r;
}

namespace {

nlohmann::json coef_json(const std::map<std::int64_t, cplx>& m) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [k, c] : m) a.push_back({{"m", k}, {"re", c.real()}, {"im", c.imag()}});
  return a;
}

std::map<std::int64_t, cplx> coef_from_json(const nlohmann::json& j) {
  std::map<std::int64_t, cplx> m;
  for (const auto& e : j) m.emplace(e.at("m").get<std::int64_t>(), cplx(e.at("re").get<double>(), e.at("im").get<double>()));
  return m;
}

}  // namespace

nlohmann::json to_json(const RepresentationState& s) {
  nlohmann::json reports = nlohmann::json::array(), hs = nlohmann::json::array(), qs = nlohmann::json::array(),
                 sc = nlohmann::json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  for (const auto& h : s.h_polys) hs.push_back(to_json(h));
  for (const auto& q : s.q_polys) qs.push_back(to_json(q));
  for (const auto& c : s.step_coefficients) sc.push_back(coef_json(c));
  return {{"N", s.N},
          {"l_prev", s.l_prev},
          {"coefficients", coef_json(s.coefficients)},
          {"step_coefficients", sc},
          {"reports", reports},
          {"h_polys", hs},
          {"q_polys", qs}};
}

RepresentationState representation_from_json(const nlohmann::json& j) {
  RepresentationState s;
  s.N = j.at("N").get<std::int64_t>();
  s.l_prev = j.at("l_prev").get<std::int64_t>();
  s.coefficients = coef_from_json(j.at("coefficients"));
  for (const auto& c : j.at("step_coefficients")) s.step_coefficients.push_back(coef_from_json(c));
  for (const auto& r : j.at("reports")) s.reports.push_back(step_report_from_json(r));
  for (const auto& h : j.at("h_polys")) s.h_polys.push_back(trigpoly_from_json(h));
  for (const auto& q : j.at("q_polys")) s.q_polys.push_back(trigpoly_from_json(q));
  const auto n = static_cast<std::size_t>(s.N);
  if (s.reports.size() != n || s.h_polys.size() != n || s.q_polys.size() != n || s.step_coefficients.size() != n)
    throw InputContractError("representation JSON is inconsistent with N");
  return s;
}

nlohmann::json to_json(const DriverConfig& c) {
  return {{"profile", c.profile},
          {"desk_delta", c.desk_delta},
          {"relaxation", c.relaxation},
          {"m_start", c.m_start},
          {"m_budget", c.m_budget},
          {"solve_min_per_2pi", c.solve_min_per_2pi},
          {"solve_points_per_unit", c.solve_points_per_unit},
          {"verify_per_2pi", c.verify_per_2pi},
          {"hstar_per_2pi", c.hstar_per_2pi},
          {"approx", to_json(c.approx)}};
}

DriverConfig driver_config_from_json(const nlohmann::json& j) {
  DriverConfig c;
  c.profile = j.value("profile", c.profile);
  c.desk_delta = j.value("desk_delta", c.desk_delta);
  c.relaxation = j.value("relaxation", c.relaxation);
  c.m_start = j.value("m_start", c.m_start);
  c.m_budget = j.value("m_budget", c.m_budget);
  c.solve_min_per_2pi = j.value("solve_min_per_2pi", c.solve_min_per_2pi);
  c.solve_points_per_unit = j.value("solve_points_per_unit", c.solve_points_per_unit);
  c.verify_per_2pi = j.value("verify_per_2pi", c.verify_per_2pi);
  c.hstar_per_2pi = j.value("hstar_per_2pi", c.hstar_per_2pi);
  if (j.contains("approx")) c.approx = approx_config_from_json(j.at("approx"));
  return c;
}

nlohmann::json to_json(const DecayStats& d) {
  return {{"N", d.N},
          {"max", d.max},
          {"median", d.median},
          {"q90", d.q90},
          {"first_summand", d.first_summand},
          {"first_summand_ok", d.first_summand_ok},
          {"second_summand_max", d.second_summand_max},
          {"split_slack", d.split_slack}};
}

}  // namespace nhs
