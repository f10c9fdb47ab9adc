#pragma once

#include <cstdint>
#include <vector>

#include "nhs/trigpoly.hpp"

namespace nhs {

// Exact values of an integer-spectrum polynomial at the midpoints of
// SampleGrid::circle(count): frequency k lands in bin k mod count after the
// half-step phase e^{i pi k / count}, then one inverse DFT.
class CircleAccumulator {
 public:
  explicit CircleAccumulator(std::int64_t count);
  ~CircleAccumulator();
  CircleAccumulator(const CircleAccumulator&) = delete;
  CircleAccumulator& operator=(const CircleAccumulator&) = delete;

  void add(std::int64_t k, cplx c);
  // Values of everything added so far; the accumulator stays usable.
  const std::vector<cplx>& values();
  std::int64_t count() const { return n_; }

 private:
  std::int64_t n_;
  std::vector<cplx> bins_;
  std::vector<cplx> work_;
  std::vector<cplx> out_;
  void* plan_ = nullptr;
};

std::vector<cplx> circle_values(const TrigPoly& p, std::int64_t count);

}  // namespace nhs
