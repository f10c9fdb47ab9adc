#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nhs/trigpoly.hpp"

namespace nhs {

inline constexpr const char* kProfileSingerComb = "singer-comb";
inline constexpr const char* kProfilePrimeDilated = "prime-dilated";

struct KornerParams {
  double epsilon = 0.5;
  double delta = 0.25;
  std::string profile = kProfileSingerComb;
  std::uint64_t seed = 0;
};

struct KornerConfig {
  std::string profile = kProfileSingerComb;
  std::uint64_t seed = 0;
  std::int64_t degree_budget = std::int64_t{1} << 24;
  std::int64_t term_budget = std::int64_t{1} << 25;
  // Certification grid: next power of two >= oversample * (degree + 1).
  std::int64_t certify_oversample = 4;
  std::int64_t certify_min_points = 4096;
  std::int64_t u_points = kUNormPointsPer2Pi;
  std::vector<double> probe_eps = {0.5, 0.1, 0.02};
  double safety_factor = 2.0;
  int max_attempts = 8;
};

struct KornerCertificate {
  double epsilon = 0.0;
  double delta = 0.0;
  cplx mean_coefficient{0.0, 0.0};
  double max_coefficient_modulus = 0.0;
  double u_norm_bound = 0.0;
  double u_norm_gap = 0.0;
  std::int64_t u_grid_count = 0;
  double exceptional_measure = 0.0;
  std::int64_t exceptional_grid_count = 0;
  std::int64_t degree = 0;
  bool passed = false;
};

SampleGrid certify_grid(const TrigPoly& p, const KornerConfig& cfg = {});

// Throws NonIntegerSpectrum; g must be a grid over [0, 2 pi].
KornerCertificate certify(const TrigPoly& p, double epsilon, double delta, const SampleGrid& g,
                          const KornerConfig& cfg = {});

// Deterministic in (params, cfg budgets). Throws GenerationFailed.
TrigPoly generate(const KornerParams& params, const KornerConfig& cfg = {});

// Adds the conjugate pair at +-target_degree used to raise the degree.
TrigPoly pad_degree(const TrigPoly& p, std::int64_t target_degree, double epsilon);

nlohmann::json to_json(const KornerCertificate& c);
KornerCertificate certificate_from_json(const nlohmann::json& j);

// Memoized d(eps, delta) and C(delta) for one process run.
class KornerRegistry {
 public:
  struct Entry {
    double epsilon;
    double delta;
    TrigPoly poly;
    KornerCertificate cert;
    std::int64_t generated_degree;
  };
  struct UBound {
    double delta;
    std::vector<double> probe_eps;
    std::vector<double> probe_u;
    double bound;
  };

  explicit KornerRegistry(KornerConfig cfg = {});

  const KornerConfig& config() const { return cfg_; }
  // Generates (and pads for monotonicity) on first use.
  const Entry& entry(double epsilon, double delta);
  std::int64_t degree_for(double epsilon, double delta);
  double u_bound_for_delta(double delta);
  std::vector<UBound> u_bounds() const;
  std::vector<Entry> entries() const;

 private:
  Entry& ensure_locked(double epsilon, double delta);
  void enforce_monotone_locked();

  KornerConfig cfg_;
  mutable std::recursive_mutex mu_;
  std::map<std::pair<double, double>, Entry> entries_;
  std::map<double, UBound> ubounds_;
};

}  // namespace nhs
