#include "nhs/config.hpp"

#include "nhs/errors.hpp"

namespace nhs {

namespace {

void positive(double v, const char* what) {
  if (!(v > 0.0)) throw InputContractError(std::string(what) + " must be positive");
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.l_max < 1) throw InputContractError("l_max must be >= 1");
  if (c.N_max < 0) throw InputContractError("N_max must be >= 0");
  if (c.driver.profile != kProfileDesk && c.driver.profile != kProfileFaithful)
    throw InputContractError("profile must be \"desk\" or \"faithful\"");
  if (c.korner.profile != kProfileSingerComb && c.korner.profile != kProfilePrimeDilated)
    throw InputContractError("unknown korner profile: " + c.korner.profile);
  positive(c.driver.desk_delta, "driver.desk_delta");
  positive(c.driver.relaxation, "driver.relaxation");
  positive(static_cast<double>(c.driver.m_start), "driver.m_start");
  positive(static_cast<double>(c.driver.m_budget), "driver.m_budget");
  positive(static_cast<double>(c.driver.solve_min_per_2pi), "driver.solve_min_per_2pi");
  positive(static_cast<double>(c.driver.solve_points_per_unit), "driver.solve_points_per_unit");
  positive(static_cast<double>(c.driver.verify_per_2pi), "driver.verify_per_2pi");
  positive(static_cast<double>(c.driver.hstar_per_2pi), "driver.hstar_per_2pi");
  positive(c.basis.relaxation, "basis.relaxation");
  positive(static_cast<double>(c.basis.cap_budget), "basis.cap_budget");
  positive(static_cast<double>(c.basis.initial_extra), "basis.initial_extra");
  positive(static_cast<double>(c.basis.solve_points_per_unit), "basis.solve_points_per_unit");
  positive(static_cast<double>(c.basis.min_solve_per_2pi), "basis.min_solve_per_2pi");
  positive(static_cast<double>(c.basis.verify_per_2pi), "basis.verify_per_2pi");
  positive(static_cast<double>(c.basis.stagnation_limit), "basis.stagnation_limit");
  for (const ApproxConfig* a : {&c.driver.approx, &c.basis.approx}) {
    positive(a->regularization, "approx.regularization");
    positive(static_cast<double>(a->max_iterations), "approx.max_iterations");
    positive(a->truncation_factor, "approx.truncation_factor");
  }
  positive(static_cast<double>(c.korner.degree_budget), "korner.degree_budget");
  positive(static_cast<double>(c.korner.term_budget), "korner.term_budget");
  positive(static_cast<double>(c.korner.u_points), "korner.u_points");
  positive(static_cast<double>(c.korner.max_attempts), "korner.max_attempts");
  positive(c.korner.safety_factor, "korner.safety_factor");
  positive(static_cast<double>(c.spectrum.b0), "spectrum.b0");
  positive(static_cast<double>(c.spectrum.d0), "spectrum.d0");
}

nlohmann::json to_json(const KornerConfig& c) {
  return {{"profile", c.profile},
          {"seed", c.seed},
          {"degree_budget", c.degree_budget},
          {"term_budget", c.term_budget},
          {"certify_oversample", c.certify_oversample},
          {"certify_min_points", c.certify_min_points},
          {"u_points", c.u_points},
          {"probe_eps", c.probe_eps},
          {"safety_factor", c.safety_factor},
          {"max_attempts", c.max_attempts}};
}

KornerConfig korner_config_from_json(const nlohmann::json& j) {
  KornerConfig c;
  c.profile = j.value("profile", c.profile);
  c.seed = j.value("seed", c.seed);
  c.degree_budget = j.value("degree_budget", c.degree_budget);
  c.term_budget = j.value("term_budget", c.term_budget);
  c.certify_oversample = j.value("certify_oversample", c.certify_oversample);
  c.certify_min_points = j.value("certify_min_points", c.certify_min_points);
  c.u_points = j.value("u_points", c.u_points);
  c.probe_eps = j.value("probe_eps", c.probe_eps);
  c.safety_factor = j.value("safety_factor", c.safety_factor);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  return c;
}

nlohmann::json to_json(const SpectrumConfig& c) {
  return {{"b0", c.b0}, {"d0", c.d0}, {"dump_blocks", c.dump_blocks}, {"dump_fallback", c.dump_fallback}};
}

SpectrumConfig spectrum_config_from_json(const nlohmann::json& j) {
  SpectrumConfig c;
  c.b0 = j.value("b0", c.b0);
  c.d0 = j.value("d0", c.d0);
  c.dump_blocks = j.value("dump_blocks", c.dump_blocks);
  c.dump_fallback = j.value("dump_fallback", c.dump_fallback);
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"rho", to_json(c.rho)},
          {"l_max", c.l_max},
          {"N_max", c.N_max},
          {"target", c.target},
          {"output_dir", c.output_dir},
          {"driver", to_json(c.driver)},
          {"basis", to_json(c.basis)},
          {"korner", to_json(c.korner)},
          {"spectrum", to_json(c.spectrum)}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputContractError("run config must be a JSON object");
  RunConfig c;
  if (j.contains("rho")) c.rho = rho_from_json(j.at("rho"));
  c.l_max = j.value("l_max", c.l_max);
  c.N_max = j.value("N_max", c.N_max);
  c.target = j.value("target", c.target);
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("driver")) c.driver = driver_config_from_json(j.at("driver"));
  if (j.contains("basis")) c.basis = basis_config_from_json(j.at("basis"));
  if (j.contains("korner")) c.korner = korner_config_from_json(j.at("korner"));
  if (j.contains("spectrum")) c.spectrum = spectrum_config_from_json(j.at("spectrum"));
  validate(c);
  return c;
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace nhs
