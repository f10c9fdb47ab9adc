#include "nhs/korner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "nhs/errors.hpp"
#include "nhs/fold.hpp"
#include "nhs/singer.hpp"

namespace nhs {

namespace {

constexpr double kTruncation = 5.1;  // sigma * D
constexpr double kSpread = 8.0;      // spike support in units of sigma

std::int64_t next_pow2(std::int64_t n) {
  std::int64_t g = 1;
  while (g < n) g <<= 1;
  return g;
}

void check_params(double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputContractError("Korner epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw InputContractError("Korner delta must lie in (0, 1]");
}

// Spike width such that m spikes, each exceeding 0.9 eps / m only on
// |y| < sigma * w, cover at most margin * delta.
double spike_sigma(double eps, double delta, std::int64_t m, double margin) {
  const double md = static_cast<double>(m);
  double sigma = margin * delta / (2.0 * md) / 4.0;
  for (int it = 0; it < 60; ++it) {
    const double ratio = std::sqrt(2.0 * std::numbers::pi) / (sigma * md * eps * 0.9);
    const double w = ratio > std::exp(0.5) ? std::sqrt(2.0 * std::log(ratio)) : 1.0;
    sigma = margin * delta / (2.0 * md) / w;
  }
  return sigma;
}

void check_budget(std::int64_t degree, std::int64_t terms, const KornerConfig& cfg) {
  if (degree > cfg.degree_budget || terms > cfg.term_budget)
    throw GenerationFailed("Korner recipe exceeds the degree/term budget (degree " + std::to_string(degree) +
                           ", terms " + std::to_string(terms) + ")");
}

// Fourier coefficients k = 1..D of (1/m) sum_s g(x - theta_s), g the periodic
// Gaussian with g^(k) = exp(-sigma^2 k^2 / 2), by sampling and one real DFT.
std::vector<cplx> spike_comb_coefficients(const std::vector<double>& centers, double sigma, std::int64_t D) {
  const std::int64_t G = next_pow2(std::max<std::int64_t>(4 * (D + 1), 1024));
  const double h = 2.0 * std::numbers::pi / static_cast<double>(G);
  const double amp = std::sqrt(2.0 * std::numbers::pi) / sigma / static_cast<double>(centers.size());
  std::vector<double> a(static_cast<std::size_t>(G), 0.0);
  for (double th : centers) {
    const auto lo = static_cast<std::int64_t>(std::ceil((th - kSpread * sigma) / h));
    const auto hi = static_cast<std::int64_t>(std::floor((th + kSpread * sigma) / h));
    for (std::int64_t j = lo; j <= hi; ++j) {
      const double d = static_cast<double>(j) * h - th;
      std::int64_t idx = j % G;
      if (idx < 0) idx += G;
      a[static_cast<std::size_t>(idx)] += amp * std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  std::vector<cplx> out(static_cast<std::size_t>(G / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(G), a.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<cplx> c(static_cast<std::size_t>(D));
  for (std::int64_t k = 1; k <= D; ++k) c[static_cast<std::size_t>(k - 1)] = out[static_cast<std::size_t>(k)] / static_cast<double>(G);
  return c;
}

TrigPoly from_positive_side(const std::vector<cplx>& ck) {
  std::vector<Term> t;
  t.reserve(2 * ck.size());
  for (std::size_t i = ck.size(); i-- > 0;) t.push_back({-static_cast<double>(i + 1), std::conj(-ck[i])});
  for (std::size_t i = 0; i < ck.size(); ++i) t.push_back({static_cast<double>(i + 1), -ck[i]});
  return TrigPoly(std::move(t));
}

KornerCertificate certify_core(const TrigPoly& p, double eps, double delta, const SampleGrid& g,
                               const KornerConfig& cfg, bool with_u) {
  if (!has_integer_spectrum(p)) throw NonIntegerSpectrum("certify needs an integer spectrum");
  if (g.a != 0.0 || g.b != 2.0 * std::numbers::pi) throw InputContractError("certify grid must span [0, 2 pi]");
  KornerCertificate c;
  c.epsilon = eps;
  c.delta = delta;
  for (const Term& t : p.terms())
    if (std::llround(t.freq) == 0) c.mean_coefficient += t.coef;
  c.max_coefficient_modulus = max_coefficient(p);
  c.degree = std::llround(degree(p));
  const std::vector<cplx> v = circle_values(p, g.count);
  std::int64_t n = 0;
  for (const cplx& x : v) n += std::abs(x - 1.0) >= eps;
  c.exceptional_measure = static_cast<double>(n) * (g.b - g.a) / static_cast<double>(g.count);
  c.exceptional_grid_count = g.count;
  if (with_u) {
    const UNormEstimate u = u_norm_details(p, SampleGrid::circle(cfg.u_points));
    c.u_norm_bound = u.value;
    c.u_norm_gap = u.gap;
    c.u_grid_count = cfg.u_points;
  }
  c.passed = c.mean_coefficient == cplx(0.0, 0.0) && c.max_coefficient_modulus < eps && c.exceptional_measure < delta;
  return c;
}

TrigPoly generate_singer(const KornerParams& prm, const KornerConfig& cfg) {
  const double eps = prm.epsilon, delta = prm.delta;
  std::int64_t q = next_prime(static_cast<std::int64_t>(std::ceil(1.0 / (0.81 * eps * eps))));
  double margin = 0.8;
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    double sigma = 0.0;
    std::int64_t v = 0;
    // Frequencies that are multiples of v see every spike in phase; their
    // Gaussian weight must already be below eps / 2.
    for (;;) {
      v = q * q + q + 1;
      sigma = spike_sigma(eps, delta, q + 1, margin);
      const double sv = sigma * static_cast<double>(v);
      if (std::exp(-0.5 * sv * sv) < 0.5 * eps) break;
      q = next_prime(q + 1);
    }
    const auto D = static_cast<std::int64_t>(std::ceil(kTruncation / sigma));
    check_budget(D, 2 * D, cfg);
    std::vector<std::int64_t> s = singer_set(q);
    std::vector<double> centers(s.size());
    const auto shift = static_cast<std::int64_t>(prm.seed % static_cast<std::uint64_t>(v));
    for (std::size_t i = 0; i < s.size(); ++i)
      centers[i] = 2.0 * std::numbers::pi * static_cast<double>((s[i] + shift) % v) / static_cast<double>(v);
    TrigPoly p = from_positive_side(spike_comb_coefficients(centers, sigma, D));
    if (certify_core(p, eps, delta, certify_grid(p, cfg), cfg, false).passed) return p;
    margin *= 0.85;
    q = next_prime(q + 1);
  }
  throw GenerationFailed("singer-comb recipe did not certify within max_attempts");
}

TrigPoly generate_prime_dilated(const KornerParams& prm, const KornerConfig& cfg) {
  const double eps = prm.epsilon, delta = prm.delta;
  auto m = static_cast<std::int64_t>(std::ceil(2.0 / eps));
  double margin = 0.8;
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const double sigma = spike_sigma(eps, delta, m, margin);
    const auto D = static_cast<std::int64_t>(std::ceil(kTruncation / sigma));
    std::vector<std::int64_t> primes;
    for (std::int64_t p = next_prime(31); static_cast<std::int64_t>(primes.size()) < m; p = next_prime(p + 1))
      primes.push_back(p);
    check_budget(primes.back() * D, 2 * m * D, cfg);
    std::mt19937_64 rng(prm.seed);
    std::uniform_real_distribution<double> U(0.0, 2.0 * std::numbers::pi);
    std::vector<Term> t;
    t.reserve(static_cast<std::size_t>(2 * m * D));
    const double md = static_cast<double>(m);
    for (std::int64_t pj : primes) {
      const double th = U(rng);
      for (std::int64_t k = 1; k <= D; ++k) {
        const double kd = static_cast<double>(k);
        const double w = std::exp(-0.5 * sigma * sigma * kd * kd) / md;
        const cplx e = std::polar(w, kd * th);
        t.push_back({static_cast<double>(pj * k), -e});
        t.push_back({-static_cast<double>(pj * k), -std::conj(e)});
      }
    }
    TrigPoly p(std::move(t));
    if (certify_core(p, eps, delta, certify_grid(p, cfg), cfg, false).passed) return p;
    margin *= 0.85;
    m = static_cast<std::int64_t>(std::ceil(static_cast<double>(m) * 1.25));
  }
  throw GenerationFailed("prime-dilated recipe did not certify within max_attempts");
}

}  // namespace

SampleGrid certify_grid(const TrigPoly& p, const KornerConfig& cfg) {
  const auto d = static_cast<std::int64_t>(std::llround(degree(p)));
  return SampleGrid::circle(next_pow2(std::max(cfg.certify_min_points, cfg.certify_oversample * (d + 1))));
}

KornerCertificate certify(const TrigPoly& p, double epsilon, double delta, const SampleGrid& g,
                          const KornerConfig& cfg) {
  return certify_core(p, epsilon, delta, g, cfg, true);
}

TrigPoly generate(const KornerParams& params, const KornerConfig& cfg) {
  check_params(params.epsilon, params.delta);
  if (params.profile == kProfileSingerComb) return generate_singer(params, cfg);
  if (params.profile == kProfilePrimeDilated) return generate_prime_dilated(params, cfg);
  throw InputContractError("unknown Korner profile: " + params.profile);
}

TrigPoly pad_degree(const TrigPoly& p, std::int64_t target_degree, double epsilon) {
  if (static_cast<double>(target_degree) <= degree(p)) return p;
  const double c = std::min(epsilon / 2.0, 1e-6);
  std::vector<Term> t = p.terms();
  t.push_back({static_cast<double>(target_degree), cplx(c, 0.0)});
  t.push_back({-static_cast<double>(target_degree), cplx(c, 0.0)});
  return TrigPoly(std::move(t));
}

nlohmann::json to_json(const KornerCertificate& c) {
  return {{"epsilon", c.epsilon},
          {"delta", c.delta},
          {"mean_coefficient", {c.mean_coefficient.real(), c.mean_coefficient.imag()}},
          {"max_coefficient_modulus", c.max_coefficient_modulus},
          {"u_norm_bound", c.u_norm_bound},
          {"u_norm_gap", c.u_norm_gap},
          {"u_grid_count", c.u_grid_count},
          {"exceptional_measure", c.exceptional_measure},
          {"exceptional_grid_count", c.exceptional_grid_count},
          {"degree", c.degree},
          {"passed", c.passed}};
}

KornerCertificate certificate_from_json(const nlohmann::json& j) {
  KornerCertificate c;
  c.epsilon = j.at("epsilon").get<double>();
  c.delta = j.at("delta").get<double>();
  c.mean_coefficient = cplx(j.at("mean_coefficient").at(0).get<double>(), j.at("mean_coefficient").at(1).get<double>());
  c.max_coefficient_modulus = j.at("max_coefficient_modulus").get<double>();
  c.u_norm_bound = j.at("u_norm_bound").get<double>();
  c.u_norm_gap = j.at("u_norm_gap").get<double>();
  c.u_grid_count = j.at("u_grid_count").get<std::int64_t>();
  c.exceptional_measure = j.at("exceptional_measure").get<double>();
  c.exceptional_grid_count = j.at("exceptional_grid_count").get<std::int64_t>();
  c.degree = j.at("degree").get<std::int64_t>();
  c.passed = j.at("passed").get<bool>();
  return c;
}

KornerRegistry::KornerRegistry(KornerConfig cfg) : cfg_(std::move(cfg)) {}

KornerRegistry::Entry& KornerRegistry::ensure_locked(double epsilon, double delta) {
  const auto key = std::make_pair(epsilon, delta);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  KornerParams prm{epsilon, delta, cfg_.profile, cfg_.seed};
  TrigPoly p = generate(prm, cfg_);
  KornerCertificate c = certify(p, epsilon, delta, certify_grid(p, cfg_), cfg_);
  const std::int64_t d = c.degree;
  auto [pos, ok] = entries_.emplace(key, Entry{epsilon, delta, std::move(p), c, d});
  (void)ok;
  enforce_monotone_locked();
  return pos->second;
}

void KornerRegistry::enforce_monotone_locked() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [ka, a] : entries_)
      for (auto& [kb, b] : entries_) {
        if (&a == &b) continue;
        if (a.epsilon <= b.epsilon && a.delta <= b.delta && a.cert.degree < b.cert.degree) {
          a.poly = pad_degree(a.poly, b.cert.degree, a.epsilon);
          a.cert = certify(a.poly, a.epsilon, a.delta, certify_grid(a.poly, cfg_), cfg_);
          changed = true;
        }
      }
  }
}

const KornerRegistry::Entry& KornerRegistry::entry(double epsilon, double delta) {
  std::lock_guard lock(mu_);
  return ensure_locked(epsilon, delta);
}

std::int64_t KornerRegistry::degree_for(double epsilon, double delta) {
  std::lock_guard lock(mu_);
  return ensure_locked(epsilon, delta).cert.degree;
}

double KornerRegistry::u_bound_for_delta(double delta) {
  std::lock_guard lock(mu_);
  if (auto it = ubounds_.find(delta); it != ubounds_.end()) return it->second.bound;
  UBound ub{delta, cfg_.probe_eps, {}, 0.0};
  double mx = 0.0;
  for (double e : cfg_.probe_eps) {
    const double u = ensure_locked(e, delta).cert.u_norm_bound;
    ub.probe_u.push_back(u);
    mx = std::max(mx, u);
  }
  ub.bound = cfg_.safety_factor * mx;
  ubounds_.emplace(delta, ub);
  return ub.bound;
}

std::vector<KornerRegistry::UBound> KornerRegistry::u_bounds() const {
  std::lock_guard lock(mu_);
  std::vector<UBound> out;
  for (const auto& [k, v] : ubounds_) out.push_back(v);
  return out;
}

std::vector<KornerRegistry::Entry> KornerRegistry::entries() const {
  std::lock_guard lock(mu_);
  std::vector<Entry> out;
  for (const auto& [k, v] : entries_) out.push_back(v);
  return out;
}

}  // namespace nhs
