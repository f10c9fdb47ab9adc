#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/basis.hpp"
#include "nhs/gridmeasure.hpp"
#include "nhs/korner.hpp"
#include "nhs/l0approx.hpp"
#include "nhs/spectrum.hpp"
#include "nhs/targets.hpp"

namespace nhs {

inline constexpr const char* kProfileDesk = "desk";
inline constexpr const char* kProfileFaithful = "faithful";

struct DriverConfig {
  std::string profile = kProfileDesk;
  double desk_delta = 0.2;   // desk: delta_N = desk_delta / N
  double relaxation = 1.0;   // faithful: multiplies 1 / (N C((N+1)^-3))
  std::int64_t m_start = 8;  // first pool size M_N; doubled while the solve misses
  std::int64_t m_budget = 512;
  std::int64_t solve_min_per_2pi = 1024;
  std::int64_t solve_points_per_unit = 4;
  std::int64_t verify_per_2pi = kVerifyPointsPer2Pi;
  std::int64_t hstar_per_2pi = 1024;
  ApproxConfig approx;

  // Measure budgets are multiplied by this (window length / 2 pi under desk).
  double window_scale(std::int64_t N) const;
};

// Basis layers, Körner registry and spectrum plan, extended on demand.
class PipelineContext {
 public:
  PipelineContext(RhoRule rho, BasisConfig basis = {}, KornerConfig korner = {}, SpectrumConfig spectrum = {});

  const RhoRule& rho() const { return rho_; }
  KornerRegistry& registry() { return registry_; }
  const std::vector<BasisLayer>& layers() const { return layers_; }
  // Builds layers 1..l as needed; throws LayerBuildFailed.
  const BasisLayer& layer(std::int64_t l);
  // Plan covering at least layers 1..l; an adopted plan is reused while it suffices.
  const SpectrumPlan& plan_through(std::int64_t l);
  const std::optional<SpectrumPlan>& plan() const { return plan_; }

  void adopt_layers(std::vector<BasisLayer> layers);
  void adopt_plan(SpectrumPlan plan);
  void set_progress(BasisProgress p) { progress_ = std::move(p); }

 private:
  RhoRule rho_;
  BasisConfig basis_;
  SpectrumConfig spectrum_;
  KornerRegistry registry_;
  std::vector<BasisLayer> layers_;
  std::optional<SpectrumPlan> plan_;
  BasisProgress progress_;
};

struct StepReport {
  std::int64_t N = 0;
  std::string profile;
  double delta_N = 0.0;
  double window_scale = 1.0;
  std::int64_t M_N = 0;
  std::int64_t l_N = 0;
  double g_a_norm = 0.0;
  double q_a_norm = 0.0;
  double layer_max_a_norm = 0.0;
  double epsilon_l = 0.0;
  std::int64_t b_l = 0;
  std::int64_t d_l = 0;
  double p_u_norm = 0.0;
  bool materialized = false;  // layer l_N, P_N and the plan were built
  std::int64_t h_terms = 0;
  double exceed_Gg = 0.0;
  double exceed_HG = 0.0;        // m{|Q_N - G_N| >= delta_N}
  double exceed_KH_window = 0.0; // m{|H_N - Q_N| >= delta_N}
  double exceed_fS = 0.0;        // m{|f - S_N| >= 3 delta_N}
  double bound_Gg = 0.0;
  double bound_HG = 0.0;
  double bound_KH = 0.0;
  double bound_fS = 0.0;
  double h_star_max = 0.0;
  double h_star_median = 0.0;
  double bound_first_summand = 0.0;
  std::map<std::string, bool> bound_checks;
  ApproxReport g_report;

  bool all_checks() const;
};

struct RepresentationState {
  std::int64_t N = 0;
  std::map<std::int64_t, cplx> coefficients;  // keyed by lambda index m
  std::vector<StepReport> reports;
  std::vector<TrigPoly> h_polys;  // H_1..H_N
  std::vector<TrigPoly> q_polys;  // Q_1..Q_N
  std::vector<std::map<std::int64_t, cplx>> step_coefficients;
  std::int64_t l_prev = 0;
};

struct StepFailed : Error {
  StepFailed(std::int64_t N_, std::string stage_, const std::string& what, nlohmann::json detail_);
  std::int64_t N;
  std::string stage;  // "solve", "layer", "generation" or "plan"
  nlohmann::json detail;
  std::shared_ptr<RepresentationState> partial;
};

double delta_schedule(std::int64_t N, const DriverConfig& cfg, KornerRegistry& registry);

// S_N from the first N retained H polynomials (N <= state.N).
TrigPoly partial_sum(const RepresentationState& state, std::int64_t N);
// S_N rebuilt from the coefficient map and the plan's lambda values.
TrigPoly reconstruct_sum(const RepresentationState& state, const SpectrumPlan& plan);

RepresentationState step(const RepresentationState& state, const Target& f, PipelineContext& ctx,
                         const DriverConfig& cfg = {});

struct FsVerification {
  ExceedanceReport report;
  double bound = 0.0;
  bool passed = false;
};
FsVerification verify_fS(const RepresentationState& state, const Target& f, std::int64_t N,
                         const DriverConfig& cfg = {});

struct DecayStats {
  std::int64_t N = 0;
  double max = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double first_summand = 0.0;
  bool first_summand_ok = true;
  double second_summand_max = 0.0;
  // max over the grid of H_N^* - (first + second summand); <= 1e-9 expected.
  double split_slack = 0.0;
};
std::vector<DecayStats> maximal_decay(const RepresentationState& state, std::int64_t n_first,
                                      std::int64_t n_last, const DriverConfig& cfg = {});

// Throws StepFailed with `partial` set to the completed steps.
RepresentationState run(const Target& f, std::int64_t N_max, PipelineContext& ctx, const DriverConfig& cfg = {});

nlohmann::json to_json(const StepReport& r);
StepReport step_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RepresentationState& s);
RepresentationState representation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DriverConfig& c);
DriverConfig driver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecayStats& d);

}  // namespace nhs
