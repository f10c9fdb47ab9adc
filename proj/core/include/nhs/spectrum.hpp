#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/basis.hpp"
#include "nhs/korner.hpp"
#include "nhs/rho.hpp"

namespace nhs {

struct LayerRecord {
  std::int64_t l = 0;
  double eta_l = 0.0;
  double eta_prev = 0.0;
  double max_a_norm = 0.0;
  double epsilon_l = 0.0;
  std::int64_t d_l = 0;
  std::int64_t b_l = 0;
  bool operator==(const LayerRecord&) const = default;
};

struct SpectrumConfig {
  std::int64_t b0 = 1;
  std::int64_t d0 = 1;
  // Blocks 1..dump_blocks (and d_l) of every layer go into the JSON lambda map,
  // as do fallback indices |m| <= dump_fallback.
  std::int64_t dump_blocks = 2;
  std::int64_t dump_fallback = 64;
};

struct SpectrumPlan {
  RhoRule rho;
  SpectrumConfig config;
  std::string fallback = "sigma";
  std::string korner_profile;
  std::uint64_t korner_seed = 0;
  std::vector<LayerRecord> layers;

  const LayerRecord& layer(std::int64_t l) const;
  std::int64_t l_max() const { return static_cast<std::int64_t>(layers.size()); }
  // Largest |m| covered: max over layers of d_l b_l + ceil(eta_l).
  std::int64_t materialized_max() const;
};

double compute_epsilon(std::int64_t l, double max_a_norm);
double compute_epsilon(std::int64_t l, const BasisLayer& layer);
std::int64_t compute_d(std::int64_t l, double epsilon_l, KornerRegistry& registry);
// Smallest integer > prev_b prev_d + ceil(eta_prev) + 2 ceil(eta_l); throws PlanOverflow.
std::int64_t compute_b(std::int64_t prev_b, std::int64_t prev_d, double eta_prev, double eta_l);

// Layers must be 1..L in order. Registry entries for every layer are generated
// before any degree is read, so padding for monotonicity is already settled.
SpectrumPlan build_plan(const std::vector<BasisLayer>& layers, const RhoRule& rho,
                        KornerRegistry& registry, const SpectrumConfig& cfg = {});

// n belongs to layer l iff sigma(n) lies in I_l (closed at 0 for l = 1,
// open at eta_{l-1} otherwise so every n belongs to at most one layer).
bool in_layer(std::int64_t n, const LayerRecord& rec, const RhoRule& rho);
std::vector<std::int64_t> layer_indices(std::int64_t l, const SpectrumPlan& plan);

// lambda(m) = m + rho(k) kept structurally so that lambda(m) - m is exact.
struct LambdaValue {
  std::int64_t m = 0;
  std::int64_t k = 0;
  double rho = 0.0;
  bool mapped = false;
  std::int64_t l = 0;
  std::int64_t s = 0;
  std::int64_t n = 0;
  double value() const { return static_cast<double>(m) + rho; }
};

LambdaValue lambda_of(std::int64_t m, const SpectrumPlan& plan);
std::vector<std::int64_t> block_indices(std::int64_t l, std::int64_t s, const SpectrumPlan& plan);
// lambda(m) for the indices of block (l, s), in the same order.
std::vector<double> block_frequencies(std::int64_t l, std::int64_t s, const SpectrumPlan& plan);
// Indices m of the explicit lambda map written to JSON.
std::vector<std::int64_t> dumped_indices(const SpectrumPlan& plan);

struct PlanChecks {
  bool eps_def = true;
  bool b_recurrence = true;
  bool disjoint = true;
  bool disjoint_enumerated = false;  // true when every block interval was listed
  bool lambda_membership = true;
  bool decay_bound = true;
  bool repetition_bound = true;
  std::int64_t checked_indices = 0;
  bool all() const {
    return eps_def && b_recurrence && disjoint && lambda_membership && decay_bound && repetition_bound;
  }
};

PlanChecks verify_plan(const SpectrumPlan& plan);

nlohmann::json to_json(const SpectrumPlan& plan);
SpectrumPlan spectrum_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PlanChecks& c);

}  // namespace nhs
