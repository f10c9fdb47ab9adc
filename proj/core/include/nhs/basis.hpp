#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/errors.hpp"
#include "nhs/gridmeasure.hpp"
#include "nhs/l0approx.hpp"
#include "nhs/rho.hpp"
#include "nhs/trigpoly.hpp"

namespace nhs {

struct BasisConfig {
  double relaxation = 1.0;  // measure bound is relaxation / l^3
  std::int64_t cap_budget = std::int64_t{1} << 12;
  std::int64_t initial_extra = 16;  // first cap = floor + initial_extra, then doubled
  std::int64_t solve_points_per_unit = 4;
  std::int64_t min_solve_per_2pi = 2048;
  std::int64_t verify_per_2pi = kVerifyPointsPer2Pi;
  // Stop growing the cap after this many doublings without a 1% gain.
  int stagnation_limit = 2;
  ApproxConfig approx;
};

struct BasisEntry {
  std::int64_t r = 0;
  TrigPoly poly;
  ApproxReport report;
  ExceedanceReport verify;
  double a_norm = 0.0;
  double degree = 0.0;
};

struct BasisLayer {
  std::int64_t l = 0;
  RhoRule rho;
  double eta_l = 0.0;
  double eta_prev = 0.0;
  double max_a_norm = 0.0;
  double relaxation = 1.0;
  double threshold = 0.0;      // 1 / l^2
  double measure_bound = 0.0;  // relaxation / l^3
  std::vector<BasisEntry> entries;  // r = -l..l

  const BasisEntry& at(std::int64_t r) const;
};

struct LayerBuildFailed : Error {
  LayerBuildFailed(std::int64_t l_, std::int64_t r_, ApproxReport best_, ExceedanceReport verify_);
  std::int64_t l;
  std::int64_t r;
  ApproxReport best;
  ExceedanceReport verify;
};

using BasisProgress = std::function<void(std::int64_t l, std::int64_t r, std::int64_t cap, double exceedance)>;

// prev must be layer l - 1 (nullptr for l = 1).
BasisLayer build_layer(std::int64_t l, const BasisLayer* prev, const RhoRule& rho,
                       const BasisConfig& cfg = {}, const BasisProgress& progress = {});

double layer_a_norm_max(const BasisLayer& layer);

nlohmann::json to_json(const BasisLayer& layer);
BasisLayer basis_layer_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BasisConfig& c);
BasisConfig basis_config_from_json(const nlohmann::json& j);

}  // namespace nhs
