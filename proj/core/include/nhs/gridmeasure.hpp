#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/trigpoly.hpp"

namespace nhs {

struct ExceedanceReport {
  double threshold = 0.0;
  double a = 0.0;
  double b = 0.0;
  double estimated_measure = 0.0;
  std::int64_t exceed_count = 0;
  std::int64_t grid_count = 0;
  bool operator==(const ExceedanceReport&) const = default;
};

// Verification density used wherever a caller does not pick one.
inline constexpr std::int64_t kVerifyPointsPer2Pi = 4096;

// Counts samples with |s_j| >= t (closed threshold).
ExceedanceReport exceedance_measure(std::span<const double> samples, const SampleGrid& g, double t);
ExceedanceReport exceedance_measure(std::span<const cplx> samples, const SampleGrid& g, double t);

ExceedanceReport exceedance_of_difference(const TrigPoly& p, std::span<const cplx> target,
                                          const SampleGrid& g, double t);

nlohmann::json to_json(const ExceedanceReport& r);
ExceedanceReport exceedance_from_json(const nlohmann::json& j);

// Columns: x,abs,exceeds
void write_exceedance_csv(std::ostream& os, const SampleGrid& g, std::span<const cplx> samples, double t);

}  // namespace nhs
