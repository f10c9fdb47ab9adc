#include "nhs/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "nhs/config.hpp"
#include "nhs/driver.hpp"
#include "nhs/errors.hpp"
#include "nhs/korner.hpp"
#include "nhs/spectrum.hpp"
#include "nhs/targets.hpp"

namespace nhs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed check that is not an exception (certificate not passed, bound missed).
struct CheckFailed {};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw BadInput("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw BadInput("malformed JSON in " + p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) { write_atomic(p, j.dump(2) + "\n"); }

struct Session {
  std::ostream& out;
  std::ostream& err;
  std::string command;
  std::string config_path;
  std::string out_dir;
  RunConfig cfg;
  fs::path dir;

  void load() {
    if (!config_path.empty()) cfg = run_config_from_json(read_json(config_path));
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    validate(cfg);
    dir = cfg.output_dir;
    if (dir.is_relative())
      if (const char* root = std::getenv(kOutputRootEnv); root && *root) dir = fs::path(root) / dir;
    fs::create_directories(dir);
  }

  fs::path layer_path(std::int64_t l) const { return dir / ("basis_l" + std::to_string(l) + ".json"); }

  json basis_key() const { return {{"rho", to_json(cfg.rho)}, {"basis", to_json(cfg.basis)}}; }
  json plan_key() const {
    return {{"rho", to_json(cfg.rho)}, {"basis", to_json(cfg.basis)}, {"korner", to_json(cfg.korner)},
            {"spectrum", to_json(cfg.spectrum)}};
  }

  // Reuses layers and plan already in the output directory when they were
  // produced under the same settings.
  std::unique_ptr<PipelineContext> context() {
    auto ctx_ptr = std::make_unique<PipelineContext>(cfg.rho, cfg.basis, cfg.korner, cfg.spectrum);
    PipelineContext& ctx = *ctx_ptr;
    ctx.set_progress([this](std::int64_t l, std::int64_t r, std::int64_t cap, double e) {
      err << "basis l=" << l << " r=" << r << " cap=" << cap << " exceedance=" << e << "\n";
    });
    const fs::path key = dir / "basis_key.json";
    if (fs::exists(key) && read_json(key) == basis_key()) {
      std::vector<BasisLayer> layers;
      for (std::int64_t l = 1; fs::exists(layer_path(l)); ++l) layers.push_back(basis_layer_from_json(read_json(layer_path(l))));
      ctx.adopt_layers(std::move(layers));
      const fs::path pkey = dir / "plan_key.json", plan = dir / "plan.json";
      if (fs::exists(pkey) && fs::exists(plan) && read_json(pkey) == plan_key()) {
        SpectrumPlan p = spectrum_plan_from_json(read_json(plan));
        if (p.l_max() <= static_cast<std::int64_t>(ctx.layers().size())) ctx.adopt_plan(std::move(p));
      }
    }
    return ctx_ptr;
  }

  void save(const PipelineContext& ctx) {
    write_json(dir / "basis_key.json", basis_key());
    for (const BasisLayer& L : ctx.layers())
      if (!fs::exists(layer_path(L.l))) write_json(layer_path(L.l), to_json(L));
    if (ctx.plan()) {
      write_json(dir / "plan_key.json", plan_key());
      write_json(dir / "plan.json", to_json(*ctx.plan()));
    }
  }

  void failure(const std::string& type, const std::string& message, json detail = json::object()) {
    write_json(dir / "failure.json",
               {{"command", command}, {"error", type}, {"message", message}, {"detail", std::move(detail)}});
    err << "error: " << message << "\n";
  }
};

std::string error_name(const Error& e) {
  if (dynamic_cast<const GenerationFailed*>(&e)) return "GenerationFailed";
  if (dynamic_cast<const NonIntegerSpectrum*>(&e)) return "NonIntegerSpectrum";
  if (dynamic_cast<const InvalidRho*>(&e)) return "InvalidRho";
  if (dynamic_cast<const PoolTooSmall*>(&e)) return "PoolTooSmall";
  if (dynamic_cast<const OutOfMaterializedRange*>(&e)) return "OutOfMaterializedRange";
  if (dynamic_cast<const PlanOverflow*>(&e)) return "PlanOverflow";
  return "Error";
}

std::string target_tag(const std::string& name) {
  std::string t = fs::path(name).stem().string();
  for (char& c : t)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return t;
}

void build_layers(Session& s, PipelineContext& ctx, std::int64_t l_max) {
  try {
    for (std::int64_t l = 1; l <= l_max; ++l) {
      const BasisLayer& L = ctx.layer(l);
      s.out << "layer " << l << ": eta=" << L.eta_l << " max_a_norm=" << L.max_a_norm << "\n";
    }
  } catch (const LayerBuildFailed& e) {
    s.save(ctx);
    s.failure("LayerBuildFailed", e.what(),
              {{"l", e.l}, {"r", e.r}, {"verify", to_json(e.verify)}, {"best", to_json(e.best)}});
    throw CheckFailed{};
  }
  s.save(ctx);
}

int cmd_korner_gen(Session& s, const KornerParams& prm, const std::string& out_path) {
  KornerConfig kc = s.cfg.korner;
  kc.profile = prm.profile;
  kc.seed = prm.seed;
  const TrigPoly p = generate(prm, kc);
  const KornerCertificate c = certify(p, prm.epsilon, prm.delta, certify_grid(p, kc), kc);
  fs::path out = out_path;
  fs::path cert = out;
  cert.replace_extension(".cert.json");
  write_json(out, to_json(p));
  write_json(cert, to_json(c));
  s.out << "degree=" << c.degree << " passed=" << (c.passed ? "true" : "false") << "\n";
  return c.passed ? 0 : 1;
}

int cmd_korner_certify(Session& s, const std::string& in, double eps, double delta, const std::string& out_path) {
  const TrigPoly p = trigpoly_from_json(read_json(in));
  const KornerCertificate c = certify(p, eps, delta, certify_grid(p, s.cfg.korner), s.cfg.korner);
  if (!out_path.empty()) write_json(out_path, to_json(c));
  s.out << to_json(c).dump(2) << "\n";
  return c.passed ? 0 : 1;
}

int cmd_spectrum(Session& s, std::int64_t l_max) {
  auto ctx_ptr = s.context();
  PipelineContext& ctx = *ctx_ptr;
  build_layers(s, ctx, l_max);
  try {
    const SpectrumPlan& plan = ctx.plan_through(l_max);
    s.save(ctx);
    const PlanChecks checks = verify_plan(plan);
    write_json(s.dir / "plan_checks.json", to_json(checks));
    s.out << "plan through l=" << plan.l_max() << " checks=" << (checks.all() ? "pass" : "fail") << "\n";
    return checks.all() ? 0 : 1;
  } catch (const GenerationFailed& e) {
    s.save(ctx);
    s.failure("GenerationFailed", e.what());
    return 1;
  }
}

fs::path state_path(const Session& s, const std::string& tag) { return s.dir / ("represent_" + tag + ".json"); }

int cmd_represent_run(Session& s, const std::string& target_name, std::int64_t n_max) {
  const Target f = resolve_target(target_name);
  const std::string tag = target_tag(target_name);
  auto ctx_ptr = s.context();
  PipelineContext& ctx = *ctx_ptr;
  try {
    const RepresentationState st = run(f, n_max, ctx, s.cfg.driver);
    s.save(ctx);
    write_json(state_path(s, tag), {{"target", target_name}, {"state", to_json(st)}});
    bool ok = true;
    for (const StepReport& r : st.reports) {
      s.out << "N=" << r.N << " l=" << r.l_N << " exceed_fS=" << r.exceed_fS << " bound=" << r.bound_fS
            << " checks=" << (r.all_checks() ? "pass" : "fail") << "\n";
      ok = ok && r.all_checks();
    }
    return ok ? 0 : 1;
  } catch (const StepFailed& e) {
    s.save(ctx);
    if (e.partial) write_json(state_path(s, tag), {{"target", target_name}, {"state", to_json(*e.partial)}});
    s.failure("StepFailed", e.what(), {{"N", e.N}, {"stage", e.stage}, {"detail", e.detail}});
    return 1;
  }
}

int cmd_represent_verify(Session& s, const std::string& target_name, const std::string& state_file) {
  const Target f = resolve_target(target_name);
  const std::string tag = target_tag(target_name);
  const json j = read_json(state_file.empty() ? state_path(s, tag) : fs::path(state_file));
  const RepresentationState st = representation_from_json(j.at("state"));
  json fsv = json::array(), decay = json::array();
  bool ok = true;
  for (std::int64_t N = 1; N <= st.N; ++N) {
    const FsVerification v = verify_fS(st, f, N, s.cfg.driver);
    const StepReport& r = st.reports[static_cast<std::size_t>(N - 1)];
    const bool reproduced = v.report.estimated_measure == r.exceed_fS;
    fsv.push_back({{"N", N}, {"report", to_json(v.report)}, {"bound", v.bound}, {"passed", v.passed},
                   {"reproduced", reproduced}, {"bound_checks", r.bound_checks}});
    ok = ok && v.passed && reproduced && r.all_checks();
  }
  if (st.N > 0)
    for (const DecayStats& d : maximal_decay(st, 1, st.N, s.cfg.driver)) {
      decay.push_back(to_json(d));
      ok = ok && d.first_summand_ok && d.split_slack <= 1e-9;
    }
  write_json(s.dir / ("verify_" + tag + ".json"), {{"target", target_name}, {"fS", fsv}, {"decay", decay}, {"passed", ok}});
  s.out << "verify " << tag << ": " << (ok ? "pass" : "fail") << "\n";
  return ok ? 0 : 1;
}

int cmd_export(Session& s, const std::string& target_name, const std::string& state_file) {
  const Target f = resolve_target(target_name);
  const std::string tag = target_tag(target_name);
  const json j = read_json(state_file.empty() ? state_path(s, tag) : fs::path(state_file));
  const RepresentationState st = representation_from_json(j.at("state"));
  for (std::int64_t N = 1; N <= st.N; ++N) {
    const SampleGrid g = SampleGrid::window(static_cast<double>(N), s.cfg.driver.hstar_per_2pi);
    const std::vector<cplx> fv = f.samples(g);
    const TrigPoly S = partial_sum(st, N);
    const TrigPoly& H = st.h_polys[static_cast<std::size_t>(N - 1)];
    const std::vector<cplx> sv = S.empty() ? std::vector<cplx>(fv.size()) : evaluate(S, g);
    const std::vector<double> hv = H.empty() ? std::vector<double>(fv.size(), 0.0) : maximal_function(H, g);
    std::ostringstream os;
    os.precision(17);
    os << "x,f,S_N,residual,H_N_star\n";
    for (std::size_t i = 0; i < fv.size(); ++i)
      os << g.point(static_cast<std::int64_t>(i)) << ',' << fv[i].real() << ',' << sv[i].real() << ','
         << std::abs(fv[i] - sv[i]) << ',' << hv[i] << '\n';
    const fs::path p = s.dir / ("plot_" + tag + "_N" + std::to_string(N) + ".csv");
    write_atomic(p, os.str());
    s.out << p.string() << "\n";
  }
  return 0;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw BadInput("cannot write " + tmp.string());
    o << text;
    if (!o) throw BadInput("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonharmonic series representation pipeline"};
  app.require_subcommand(1);
  Session s{out, err, "", "", "", {}, {}};
  auto common = [&](CLI::App* c) {
    c->add_option("--config", s.config_path, "RunConfig JSON file");
    c->add_option("--out-dir", s.out_dir, "Output directory (overrides the config)");
  };

  KornerParams kp;
  std::string k_out = "korner.json", k_in, k_cert_out;
  auto* korner = app.add_subcommand("korner", "Generate or certify integer-spectrum polynomials");
  korner->require_subcommand(1);
  auto* kgen = korner->add_subcommand("gen", "Generate a polynomial and its certificate");
  common(kgen);
  kgen->add_option("--eps", kp.epsilon)->required();
  kgen->add_option("--delta", kp.delta)->required();
  kgen->add_option("--profile", kp.profile)->check(CLI::IsMember({kProfileSingerComb, kProfilePrimeDilated}));
  kgen->add_option("--seed", kp.seed);
  kgen->add_option("--out", k_out, "Polynomial JSON; the certificate goes next to it as *.cert.json");
  auto* kcert = korner->add_subcommand("certify", "Certify a polynomial read from JSON");
  common(kcert);
  kcert->add_option("--in", k_in)->required();
  kcert->add_option("--eps", kp.epsilon)->required();
  kcert->add_option("--delta", kp.delta)->required();
  kcert->add_option("--out", k_cert_out, "Certificate JSON");

  std::optional<std::int64_t> l_max, n_max;
  std::string target, state_file;
  auto* basis = app.add_subcommand("basis", "Basis layers");
  basis->require_subcommand(1);
  auto* bbuild = basis->add_subcommand("build", "Build layers 1..L");
  common(bbuild);
  bbuild->add_option("--l-max", l_max);
  auto* spectrum = app.add_subcommand("spectrum", "Spectrum plan");
  spectrum->require_subcommand(1);
  auto* sbuild = spectrum->add_subcommand("build", "Build the plan through layer L");
  common(sbuild);
  sbuild->add_option("--l-max", l_max);
  auto* represent = app.add_subcommand("represent", "Representation runs");
  represent->require_subcommand(1);
  auto* rrun = represent->add_subcommand("run", "Run the step loop for one target");
  common(rrun);
  rrun->add_option("--target", target, "Built-in target name or CSV path");
  rrun->add_option("--n-max", n_max);
  auto* rverify = represent->add_subcommand("verify", "Re-verify a saved representation");
  common(rverify);
  rverify->add_option("--target", target);
  rverify->add_option("--state", state_file);
  auto* exp = app.add_subcommand("export", "Per-step CSV for plotting");
  common(exp);
  bool plot = false;
  exp->add_flag("--plot", plot)->required();
  exp->add_option("--target", target);
  exp->add_option("--state", state_file);
  auto* config = app.add_subcommand("config", "Print the canonical form of a RunConfig");
  common(config);
  std::string config_out;
  config->add_option("--out", config_out);

  std::vector<std::string> argv_store{"nhs"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const bool needs_dir = !korner->parsed();
    if (needs_dir) {
      s.load();
    } else if (!s.config_path.empty()) {
      s.cfg = run_config_from_json(read_json(s.config_path));
    }
    if (target.empty()) target = s.cfg.target;
    if (kgen->parsed()) {
      s.command = "korner gen";
      return cmd_korner_gen(s, kp, k_out);
    }
    if (kcert->parsed()) {
      s.command = "korner certify";
      return cmd_korner_certify(s, k_in, kp.epsilon, kp.delta, k_cert_out);
    }
    if (bbuild->parsed()) {
      s.command = "basis build";
      auto ctx = s.context();
      build_layers(s, *ctx, l_max.value_or(s.cfg.l_max));
      return 0;
    }
    if (sbuild->parsed()) {
      s.command = "spectrum build";
      return cmd_spectrum(s, l_max.value_or(s.cfg.l_max));
    }
    if (rrun->parsed()) {
      s.command = "represent run";
      return cmd_represent_run(s, target, n_max.value_or(s.cfg.N_max));
    }
    if (rverify->parsed()) {
      s.command = "represent verify";
      return cmd_represent_verify(s, target, state_file);
    }
    if (exp->parsed()) {
      s.command = "export";
      return cmd_export(s, target, state_file);
    }
    if (config->parsed()) {
      const std::string text = dump_config(s.cfg);
      if (config_out.empty())
        out << text;
      else
        write_atomic(config_out, text);
      return 0;
    }
  } catch (const CheckFailed&) {
    return 1;
  } catch (const BadInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const InputContractError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (!s.dir.empty()) s.failure(error_name(e), e.what());
    else err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace nhs::cli
