#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace nhs {

using cplx = std::complex<double>;

struct Term {
  double freq = 0.0;
  cplx coef{0.0, 0.0};
  bool operator==(const Term&) const = default;
};

// Uniform midpoint grid: x_j = a + (j + 1/2) (b - a) / count.
struct SampleGrid {
  double a = 0.0;
  double b = 0.0;
  std::int64_t count = 1;

  static SampleGrid make(double a, double b, std::int64_t count);
  // [0, 2 pi] with `count` points; the grid every periodic check uses.
  static SampleGrid circle(std::int64_t count);
  // [-w pi, w pi] with `per_2pi` points per unit of 2 pi.
  static SampleGrid window(double w, std::int64_t per_2pi);

  double step() const { return (b - a) / static_cast<double>(count); }
  double length() const { return b - a; }
  double point(std::int64_t j) const {
    return a + (static_cast<double>(j) + 0.5) * (b - a) / static_cast<double>(count);
  }
  std::vector<double> points() const;
  bool operator==(const SampleGrid&) const = default;
};

// Finite trigonometric polynomial with real frequencies, kept in canonical form:
// strictly increasing frequencies, no exactly-zero coefficients.
class TrigPoly {
 public:
  TrigPoly() = default;
  // Sorts and merges exact duplicate frequencies; drops exact zeros.
  explicit TrigPoly(std::vector<Term> terms);
  // Same, but frequencies within `tol` of the first member of a run are merged.
  static TrigPoly merged(std::vector<Term> terms, double tol);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  bool operator==(const TrigPoly&) const = default;

 private:
  std::vector<Term> terms_;
};

inline constexpr double kMergeTol = 1e-12;

cplx evaluate_at(const TrigPoly& p, double x);
std::vector<cplx> evaluate(const TrigPoly& p, const SampleGrid& g);

TrigPoly symmetric_partial_sum(const TrigPoly& p, double eta);
std::vector<double> maximal_function(const TrigPoly& p, const SampleGrid& g);
// Maximal function at a single point (same group-prefix rule).
double maximal_at(const TrigPoly& p, double x);

double a_norm(const TrigPoly& p);
double degree(const TrigPoly& p);
double max_coefficient(const TrigPoly& p);

struct UNormEstimate {
  double value = 0.0;
  // Upper bound on (exact grid maximum of P*) - value; 0 when computed exactly.
  double gap = 0.0;
  bool exact = true;
  std::int64_t checkpoints = 0;
  SampleGrid grid;
};

struct UNormOptions {
  // Minimal window length, in units of 2 pi.
  double refinement = 1.0;
  // Above terms * points the integer-spectrum checkpoint path is used.
  double exact_work_budget = 4e8;
  std::int64_t max_checkpoints = 4096;
};

double u_norm_estimate(const TrigPoly& p, const SampleGrid& g, const UNormOptions& opt = {});
UNormEstimate u_norm_details(const TrigPoly& p, const SampleGrid& g, const UNormOptions& opt = {});
inline constexpr std::int64_t kUNormPointsPer2Pi = 1 << 14;

TrigPoly dilate(const TrigPoly& p, std::int64_t n);
TrigPoly multiply(const TrigPoly& p, const TrigPoly& q);
TrigPoly add(const TrigPoly& p, const TrigPoly& q);
TrigPoly scale(const TrigPoly& p, cplx c);

bool has_integer_spectrum(const TrigPoly& p, double tol = 1e-9);

nlohmann::json to_json(const TrigPoly& p);
TrigPoly trigpoly_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SampleGrid& g);
SampleGrid grid_from_json(const nlohmann::json& j);

}  // namespace nhs
