#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nhs {

// Perturbation sequence rho(k), k >= 0, and sigma(n) = n + rho(|n|).
class RhoRule {
 public:
  enum class Kind { OneOverKPlus2, OneOverLog, Explicit };

  static RhoRule one_over_k_plus_2();
  static RhoRule one_over_log();  // 1 / log(k + 3)
  static RhoRule explicit_list(std::vector<double> values, std::int64_t monotone_from = 0);
  static RhoRule named(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;
  // Throws OutOfMaterializedRange past the end of an explicit list.
  double operator()(std::int64_t k) const;
  double sigma(std::int64_t n) const { return static_cast<double>(n) + (*this)(n < 0 ? -n : n); }
  std::int64_t monotone_from() const { return monotone_from_; }
  const std::vector<double>& values() const { return values_; }
  bool operator==(const RhoRule&) const = default;

 private:
  Kind kind_ = Kind::OneOverKPlus2;
  std::vector<double> values_;
  std::int64_t monotone_from_ = 0;
};

nlohmann::json to_json(const RhoRule& r);
RhoRule rho_from_json(const nlohmann::json& j);

}  // namespace nhs
