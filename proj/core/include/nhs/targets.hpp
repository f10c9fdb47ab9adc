#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nhs/trigpoly.hpp"

namespace nhs {

using SampleProvider = std::function<std::vector<cplx>(const SampleGrid&)>;

struct Target {
  std::string name;
  SampleProvider samples;
};

// Built-in targets:
//   zero          f = 0
//   clipped-step  f = 1 on (0, pi], 0 elsewhere
//   gaussian      f = exp(-x^2 / 2)
Target builtin_target(const std::string& name);
std::vector<std::string> builtin_target_names();

// CSV with header x,re[,im]; linear interpolation between rows, 0 outside.
Target csv_target(const std::string& path);

// Name of a built-in target, or a path to a CSV file.
Target resolve_target(const std::string& name_or_path);

Target pointwise_target(std::string name, std::function<cplx(double)> f);

}  // namespace nhs
