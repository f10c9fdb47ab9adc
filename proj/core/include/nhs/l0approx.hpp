#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/gridmeasure.hpp"
#include "nhs/rho.hpp"
#include "nhs/trigpoly.hpp"

namespace nhs {

// Indices floor < |n| <= cap, ordered by sigma(n) (negative side first).
struct FrequencyPool {
  RhoRule rho;
  std::int64_t index_floor = 0;
  std::int64_t index_cap = 0;
  std::vector<std::int64_t> indices;
  std::vector<double> freqs;
  std::size_t size() const { return indices.size(); }
};

// Throws PoolTooSmall when floor >= cap, InvalidRho on a zero rho value, a
// monotonicity break past rho.monotone_from(), or non-increasing sigma.
FrequencyPool materialize_pool(const RhoRule& rho, std::int64_t floor, std::int64_t cap);

struct ApproxConfig {
  double regularization = 1e-8;  // relative to the mean Gram diagonal
  int max_iterations = 12;       // per gap seed
  double truncation_factor = 10.0;
  double truncation_quantile = 0.99;
  std::vector<int> gap_seeds = {0, 1, 4, 16, 64};
  double sacrifice_fraction = 0.8;
  double sacrifice_weight = 1e-6;
  double emphasis_cap = 10.0;
  int stall_limit = 3;
  double prune_tol = 1e-7;  // relative to max(1, max |c|)
};

struct ApproxReport {
  std::map<std::int64_t, cplx> coefficients;
  std::int64_t pool_floor = 0;
  std::int64_t pool_cap_used = 0;
  double target_uniform_tol = 0.0;
  double target_measure_tol = 0.0;
  double achieved_exceedance = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  double truncation_level = 0.0;
  bool truncated = false;
  SampleGrid grid;
  // Best exceedance seen after each iteration (nonincreasing).
  std::vector<double> exceedance_history;
};

ApproxReport approximate_in_measure(std::span<const cplx> target, const SampleGrid& g,
                                    const FrequencyPool& pool, double delta, double mu,
                                    const ApproxConfig& cfg = {});

TrigPoly to_trigpoly(const ApproxReport& r, const RhoRule& rho);
double coefficient_a_norm(const ApproxReport& r);

nlohmann::json to_json(const ApproxReport& r);
ApproxReport approx_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ApproxConfig& c);
ApproxConfig approx_config_from_json(const nlohmann::json& j);

}  // namespace nhs
