#include "nhs/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nhs/errors.hpp"

namespace nhs {

Target pointwise_target(std::string name, std::function<cplx(double)> f) {
  return {std::move(name), [f = std::move(f)](const SampleGrid& g) {
            std::vector<cplx> out(static_cast<std::size_t>(g.count));
            for (std::int64_t j = 0; j < g.count; ++j) out[static_cast<std::size_t>(j)] = f(g.point(j));
            return out;
          }};
}

std::vector<std::string> builtin_target_names() { return {"zero", "clipped-step", "gaussian"}; }

Target builtin_target(const std::string& name) {
  if (name == "zero") return pointwise_target(name, [](double) { return cplx(0.0, 0.0); });
  if (name == "clipped-step")
    return pointwise_target(name, [](double x) { return cplx(x > 0.0 && x <= std::numbers::pi ? 1.0 : 0.0, 0.0); });
  if (name == "gaussian") return pointwise_target(name, [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); });
  throw InputContractError("unknown target: " + name);
}

Target csv_target(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputContractError("cannot open target CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputContractError("empty target CSV: " + path);
  std::vector<double> xs;
  std::vector<cplx> vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw InputContractError("target CSV rows need x,re[,im]");
    if (!xs.empty() && !(row[0] > xs.back())) throw InputContractError("target CSV x must be increasing");
    xs.push_back(row[0]);
    vs.emplace_back(row[1], row.size() > 2 ? row[2] : 0.0);
  }
  if (xs.empty()) throw InputContractError("target CSV has no rows");
  return pointwise_target(path, [xs, vs](double x) {
    if (x < xs.front() || x > xs.back()) return cplx(0.0, 0.0);
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return vs.back();
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return vs[i - 1] + t * (vs[i] - vs[i - 1]);
  });
}

Target resolve_target(const std::string& name_or_path) {
  const auto names = builtin_target_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_target(name_or_path);
  return csv_target(name_or_path);
}

}  // namespace nhs
