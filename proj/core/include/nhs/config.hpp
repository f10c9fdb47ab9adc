#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "nhs/basis.hpp"
#include "nhs/driver.hpp"
#include "nhs/korner.hpp"
#include "nhs/rho.hpp"
#include "nhs/spectrum.hpp"

namespace nhs {

// One file governs a whole run; CLI flags override single fields.
struct RunConfig {
  RhoRule rho = RhoRule::one_over_k_plus_2();
  std::int64_t l_max = 1;
  std::int64_t N_max = 3;
  std::string target = "clipped-step";
  std::string output_dir = "out";
  DriverConfig driver;
  BasisConfig basis;
  KornerConfig korner;
  SpectrumConfig spectrum;
};

// Throws InputContractError on a non-positive budget or unknown profile.
void validate(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
// Canonical text form; parse + dump reproduces it byte for byte.
std::string dump_config(const RunConfig& c);

nlohmann::json to_json(const KornerConfig& c);
KornerConfig korner_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpectrumConfig& c);
SpectrumConfig spectrum_config_from_json(const nlohmann::json& j);

}  // namespace nhs
