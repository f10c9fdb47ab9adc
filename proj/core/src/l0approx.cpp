#include "nhs/l0approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nhs/errors.hpp"

namespace nhs {

FrequencyPool materialize_pool(const RhoRule& rho, std::int64_t floor, std::int64_t cap) {
  if (floor < 0) throw InputContractError("pool floor must be >= 0");
  if (floor >= cap) throw PoolTooSmall("pool floor must be below the cap");
  for (std::int64_t k = floor + 1; k <= cap; ++k) {
    const double v = rho(k);
    if (v == 0.0 || !std::isfinite(v)) throw InvalidRho("rho(" + std::to_string(k) + ") is zero or not finite");
    if (k > rho.monotone_from() && k - 1 > floor && std::abs(v) > std::abs(rho(k - 1)))
      throw InvalidRho("|rho| increases at k = " + std::to_string(k));
  }
  FrequencyPool pool;
  pool.rho = rho;
  pool.index_floor = floor;
  pool.index_cap = cap;
  for (std::int64_t n = -cap; n <= cap; ++n) {
    if ((n < 0 ? -n : n) <= floor) continue;
    pool.indices.push_back(n);
    pool.freqs.push_back(rho.sigma(n));
  }
  for (std::size_t i = 1; i < pool.freqs.size(); ++i)
    if (!(pool.freqs[i] > pool.freqs[i - 1]))
      throw InvalidRho("sigma is not strictly increasing at n = " + std::to_string(pool.indices[i]));
  return pool;
}

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

double quantile_abs(std::span<const cplx> t, double q) {
  std::vector<double> m(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) m[i] = std::abs(t[i]);
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(m.size() - 1)));
  std::nth_element(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(k), m.end());
  return m[k];
}

std::map<std::int64_t, cplx> to_map(const FrequencyPool& pool, const VectorXcd& c, double prune) {
  std::map<std::int64_t, cplx> out;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const cplx v = c(static_cast<Eigen::Index>(p));
    if (std::abs(v) > prune && v != cplx(0.0, 0.0)) out.emplace(pool.indices[p], v);
  }
  return out;
}

}  // namespace

ApproxReport approximate_in_measure(std::span<const cplx> target, const SampleGrid& g,
                                    const FrequencyPool& pool, double delta, double mu,
                                    const ApproxConfig& cfg) {
  if (static_cast<std::int64_t>(target.size()) != g.count)
    throw InputContractError("target length does not match the grid");
  if (!(delta > 0.0) || !(mu > 0.0)) throw InputContractError("delta and mu must be positive");
  if (pool.size() == 0) throw PoolTooSmall("empty frequency pool");

  ApproxReport rep;
  rep.pool_floor = pool.index_floor;
  rep.pool_cap_used = pool.index_cap;
  rep.target_uniform_tol = delta;
  rep.target_measure_tol = mu;
  rep.grid = g;

  const auto G = static_cast<Eigen::Index>(g.count);
  const auto P = static_cast<Eigen::Index>(pool.size());

  VectorXcd t(G);
  for (Eigen::Index j = 0; j < G; ++j) t(j) = target[static_cast<std::size_t>(j)];
  const bool all_zero = std::all_of(target.begin(), target.end(), [](cplx v) { return v == cplx(0.0, 0.0); });
  if (all_zero) {
    rep.achieved_exceedance = exceedance_of_difference(TrigPoly{}, target, g, delta).estimated_measure;
    rep.converged = rep.achieved_exceedance < mu;
    return rep;
  }

  rep.truncation_level = cfg.truncation_factor * quantile_abs(target, cfg.truncation_quantile);
  if (rep.truncation_level > 0.0) {
    for (Eigen::Index j = 0; j < G; ++j) {
      const double m = std::abs(t(j));
      if (m > rep.truncation_level) {
        t(j) *= rep.truncation_level / m;
        rep.truncated = true;
      }
    }
  }

  const std::vector<double> x = g.points();
  MatrixXcd Phi(G, P);
  for (Eigen::Index p = 0; p < P; ++p) {
    const double f = pool.freqs[static_cast<std::size_t>(p)];
    for (Eigen::Index j = 0; j < G; ++j) {
      const double ph = f * x[static_cast<std::size_t>(j)];
      Phi(j, p) = cplx(std::cos(ph), std::sin(ph));
    }
  }
  MatrixXcd G0(P, P);
  G0.noalias() = Phi.adjoint() * Phi;
  const double lambda = cfg.regularization * G0.diagonal().real().mean();

  const double h = g.step();
  const auto nsac = static_cast<std::size_t>(cfg.sacrifice_fraction * mu / h);

  double best_e = std::numeric_limits<double>::infinity();
  VectorXcd best_c = VectorXcd::Zero(P);
  bool done = false;

  for (int K : cfg.gap_seeds) {
    if (done) break;
    std::vector<char> sac(static_cast<std::size_t>(G), 0);
    if (K > 0) {
      const double gw = cfg.sacrifice_fraction * mu / K;
      for (int k = 0; k < K; ++k) {
        const double c = g.a + (k + 0.5) * g.length() / K;
        for (Eigen::Index j = 0; j < G; ++j)
          if (std::abs(x[static_cast<std::size_t>(j)] - c) < gw / 2) sac[static_cast<std::size_t>(j)] = 1;
      }
    }
    VectorXd emph = VectorXd::Zero(G);
    double seed_best = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      VectorXd w(G);
      std::vector<Eigen::Index> off;
      for (Eigen::Index j = 0; j < G; ++j) {
        w(j) = (sac[static_cast<std::size_t>(j)] ? cfg.sacrifice_weight : 1.0) + emph(j);
        if (w(j) != 1.0) off.push_back(j);
      }
      MatrixXcd Gm;
      if (off.size() * 4 < static_cast<std::size_t>(G)) {
        const auto S = static_cast<Eigen::Index>(off.size());
        MatrixXcd PhiS(S, P);
        VectorXd dw(S);
        for (Eigen::Index s = 0; s < S; ++s) {
          PhiS.row(s) = Phi.row(off[static_cast<std::size_t>(s)]);
          dw(s) = w(off[static_cast<std::size_t>(s)]) - 1.0;
        }
        Gm = G0;
        if (S > 0) Gm.noalias() += PhiS.adjoint() * (dw.asDiagonal() * PhiS);
      } else {
        Gm.noalias() = Phi.adjoint() * (w.asDiagonal() * Phi);
      }
      Gm.diagonal().array() += lambda;
      const VectorXcd rhs = Phi.adjoint() * (w.cast<cplx>().cwiseProduct(t));
      const VectorXcd c = Gm.ldlt().solve(rhs);
      const VectorXcd r = Phi * c - t;
      ++rep.iterations;

      VectorXd ar = r.cwiseAbs();
      std::int64_t n_ex = 0;
      for (Eigen::Index j = 0; j < G; ++j) n_ex += ar(j) >= delta ? 1 : 0;
      const double e = static_cast<double>(n_ex) * h;
      if (e < best_e) {
        best_e = e;
        best_c = c;
      }
      rep.exceedance_history.push_back(best_e);
      if (e < mu) {
        done = true;
        break;
      }
      if (e < seed_best * 0.99) {
        seed_best = e;
        stall = 0;
      } else if (++stall >= cfg.stall_limit) {
        break;
      }

      std::vector<Eigen::Index> order(static_cast<std::size_t>(G));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return ar(i) != ar(j) ? ar(i) > ar(j) : i < j;
      });
      std::fill(sac.begin(), sac.end(), 0);
      for (std::size_t i = 0; i < std::min(nsac, order.size()); ++i) sac[static_cast<std::size_t>(order[i])] = 1;
      for (Eigen::Index j = 0; j < G; ++j) {
        if (ar(j) >= delta && !sac[static_cast<std::size_t>(j)])
          emph(j) += std::min(ar(j) / delta, cfg.emphasis_cap);
        else
          emph(j) *= 0.5;
      }
    }
  }

  const double cmax = best_c.cwiseAbs().maxCoeff();
  rep.coefficients = to_map(pool, best_c, cfg.prune_tol * std::max(1.0, cmax));
  const double pruned_e =
      exceedance_of_difference(to_trigpoly(rep, pool.rho), target, g, delta).estimated_measure;
  auto full = to_map(pool, best_c, 0.0);
  if (full.size() != rep.coefficients.size()) {
    ApproxReport alt = rep;
    alt.coefficients = std::move(full);
    const double full_e =
        exceedance_of_difference(to_trigpoly(alt, pool.rho), target, g, delta).estimated_measure;
    if (full_e < pruned_e) {
      rep.coefficients = std::move(alt.coefficients);
      rep.achieved_exceedance = full_e;
    } else {
      rep.achieved_exceedance = pruned_e;
    }
  } else {
    rep.achieved_exceedance = pruned_e;
  }
  rep.converged = rep.achieved_exceedance < mu;
  return rep;
}

TrigPoly to_trigpoly(const ApproxReport& r, const RhoRule& rho) {
  std::vector<Term> t;
  t.reserve(r.coefficients.size());
  for (const auto& [n, c] : r.coefficients) t.push_back({rho.sigma(n), c});
  return TrigPoly(std::move(t));
}

double coefficient_a_norm(const ApproxReport& r) {
  double s = 0.0;
  for (const auto& [n, c] : r.coefficients) s += std::abs(c);
  return s;
}

nlohmann::json to_json(const ApproxReport& r) {
  nlohmann::json coefs = nlohmann::json::array();
  for (const auto& [n, c] : r.coefficients) coefs.push_back({{"n", n}, {"re", c.real()}, {"im", c.imag()}});
  return {{"coefficients", coefs},
          {"pool_floor", r.pool_floor},
          {"pool_cap_used", r.pool_cap_used},
          {"target_uniform_tol", r.target_uniform_tol},
          {"target_measure_tol", r.target_measure_tol},
          {"achieved_exceedance", r.achieved_exceedance},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"truncation_level", r.truncation_level},
          {"truncated", r.truncated},
          {"grid", to_json(r.grid)},
          {"exceedance_history", r.exceedance_history}};
}

ApproxReport approx_report_from_json(const nlohmann::json& j) {
  ApproxReport r;
  for (const auto& e : j.at("coefficients"))
    r.coefficients.emplace(e.at("n").get<std::int64_t>(), cplx(e.at("re").get<double>(), e.at("im").get<double>()));
  r.pool_floor = j.at("pool_floor").get<std::int64_t>();
  r.pool_cap_used = j.at("pool_cap_used").get<std::int64_t>();
  r.target_uniform_tol = j.at("target_uniform_tol").get<double>();
  r.target_measure_tol = j.at("target_measure_tol").get<double>();
  r.achieved_exceedance = j.at("achieved_exceedance").get<double>();
  r.iterations = j.at("iterations").get<std::int64_t>();
  r.converged = j.at("converged").get<bool>();
  r.truncation_level = j.at("truncation_level").get<double>();
  r.truncated = j.at("truncated").get<bool>();
  r.grid = grid_from_json(j.at("grid"));
  r.exceedance_history = j.at("exceedance_history").get<std::vector<double>>();
  return r;
}

nlohmann::json to_json(const ApproxConfig& c) {
  return {{"regularization", c.regularization},
          {"max_iterations", c.max_iterations},
          {"truncation_factor", c.truncation_factor},
          {"truncation_quantile", c.truncation_quantile},
          {"gap_seeds", c.gap_seeds},
          {"sacrifice_fraction", c.sacrifice_fraction},
          {"sacrifice_weight", c.sacrifice_weight},
          {"emphasis_cap", c.emphasis_cap},
          {"stall_limit", c.stall_limit},
          {"prune_tol", c.prune_tol}};
}

ApproxConfig approx_config_from_json(const nlohmann::json& j) {
  ApproxConfig c;
  c.regularization = j.value("regularization", c.regularization);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  c.truncation_factor = j.value("truncation_factor", c.truncation_factor);
  c.truncation_quantile = j.value("truncation_quantile", c.truncation_quantile);
  c.gap_seeds = j.value("gap_seeds", c.gap_seeds);
  c.sacrifice_fraction = j.value("sacrifice_fraction", c.sacrifice_fraction);
  c.sacrifice_weight = j.value("sacrifice_weight", c.sacrifice_weight);
  c.emphasis_cap = j.value("emphasis_cap", c.emphasis_cap);
  c.stall_limit = j.value("stall_limit", c.stall_limit);
  c.prune_tol = j.value("prune_tol", c.prune_tol);
  return c;
}

}  // namespace nhs
