#include "nhs/rho.hpp"

#include <cmath>

#include "nhs/errors.hpp"

namespace nhs {

RhoRule RhoRule::one_over_k_plus_2() { return RhoRule{}; }

RhoRule RhoRule::one_over_log() {
  RhoRule r;
  r.kind_ = Kind::OneOverLog;
  return r;
}

RhoRule RhoRule::explicit_list(std::vector<double> values, std::int64_t monotone_from) {
  RhoRule r;
  r.kind_ = Kind::Explicit;
  r.values_ = std::move(values);
  r.monotone_from_ = monotone_from;
  return r;
}

RhoRule RhoRule::named(const std::string& name) {
  if (name == "one_over_k_plus_2") return one_over_k_plus_2();
  if (name == "one_over_log") return one_over_log();
  throw InputContractError("unknown rho rule: " + name);
}

std::string RhoRule::name() const {
  switch (kind_) {
    case Kind::OneOverKPlus2: return "one_over_k_plus_2";
    case Kind::OneOverLog: return "one_over_log";
    case Kind::Explicit: return "explicit";
  }
  return "explicit";
}

double RhoRule::operator()(std::int64_t k) const {
  if (k < 0) throw InputContractError("rho index must be >= 0");
  switch (kind_) {
    case Kind::OneOverKPlus2: return 1.0 / static_cast<double>(k + 2);
    case Kind::OneOverLog: return 1.0 / std::log(static_cast<double>(k) + 3.0);
    case Kind::Explicit:
      if (k >= static_cast<std::int64_t>(values_.size()))
        throw OutOfMaterializedRange("explicit rho list has no entry " + std::to_string(k));
      return values_[static_cast<std::size_t>(k)];
  }
  return 0.0;
}

nlohmann::json to_json(const RhoRule& r) {
  nlohmann::json j{{"rule", r.name()}};
  if (r.kind() == RhoRule::Kind::Explicit) {
    j["values"] = r.values();
    j["monotone_from"] = r.monotone_from();
  }
  return j;
}

RhoRule rho_from_json(const nlohmann::json& j) {
  if (j.is_string()) return RhoRule::named(j.get<std::string>());
  const std::string rule = j.at("rule").get<std::string>();
  if (rule == "explicit")
    return RhoRule::explicit_list(j.at("values").get<std::vector<double>>(), j.value("monotone_from", std::int64_t{0}));
  return RhoRule::named(rule);
}

}  // namespace nhs
