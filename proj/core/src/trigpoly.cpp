#include "nhs/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nhs/errors.hpp"
#include "nhs/fold.hpp"

namespace nhs {

namespace {

std::vector<Term> canonical(std::vector<Term> terms, double tol) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& x, const Term& y) { return x.freq < y.freq; });
  std::vector<Term> out;
  out.reserve(terms.size());
  std::size_t i = 0;
  while (i < terms.size()) {
    Term t = terms[i];
    std::size_t j = i + 1;
    while (j < terms.size() && terms[j].freq - t.freq <= tol) {
      t.coef += terms[j].coef;
      ++j;
    }
    if (t.coef != cplx(0.0, 0.0)) out.push_back(t);
    i = j;
  }
  return out;
}

// Term indices ordered by |freq|, with boundaries of equal-|freq| groups.
struct Groups {
  std::vector<std::size_t> order;
  std::vector<std::size_t> start;  // start[g]..start[g+1]
};

Groups group_by_modulus(const TrigPoly& p) {
  Groups g;
  const auto& t = p.terms();
  g.order.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) g.order[i] = i;
  std::stable_sort(g.order.begin(), g.order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(t[x].freq) < std::abs(t[y].freq);
  });
  for (std::size_t i = 0; i < g.order.size(); ++i) {
    if (i == 0 || std::abs(t[g.order[i]].freq) != std::abs(t[g.order[i - 1]].freq))
      g.start.push_back(i);
  }
  g.start.push_back(g.order.size());
  return g;
}

double maximal_at_grouped(const TrigPoly& p, const Groups& gr, double x) {
  const auto& t = p.terms();
  cplx s(0.0, 0.0);
  double best = 0.0;  // empty prefix
  for (std::size_t gi = 0; gi + 1 < gr.start.size(); ++gi) {
    for (std::size_t i = gr.start[gi]; i < gr.start[gi + 1]; ++i) {
      const Term& term = t[gr.order[i]];
      const double ph = term.freq * x;
      s += term.coef * cplx(std::cos(ph), std::sin(ph));
    }
    best = std::max(best, std::abs(s));
  }
  return best;
}

bool is_circle(const SampleGrid& g) { return g.a == 0.0 && g.b == 2.0 * std::numbers::pi; }

}  // namespace

SampleGrid SampleGrid::make(double a, double b, std::int64_t count) {
  if (!(a < b) || count < 1 || !std::isfinite(a) || !std::isfinite(b))
    throw InputContractError("SampleGrid requires a < b and count >= 1");
  return SampleGrid{a, b, count};
}

SampleGrid SampleGrid::circle(std::int64_t count) {
  return make(0.0, 2.0 * std::numbers::pi, count);
}

SampleGrid SampleGrid::window(double w, std::int64_t per_2pi) {
  const auto n = static_cast<std::int64_t>(std::ceil(w * static_cast<double>(per_2pi)));
  return make(-w * std::numbers::pi, w * std::numbers::pi, n);
}

std::vector<double> SampleGrid::points() const {
  std::vector<double> x(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) x[static_cast<std::size_t>(j)] = point(j);
  return x;
}

TrigPoly::TrigPoly(std::vector<Term> terms) : terms_(canonical(std::move(terms), 0.0)) {}

TrigPoly TrigPoly::merged(std::vector<Term> terms, double tol) {
  TrigPoly p;
  p.terms_ = canonical(std::move(terms), tol);
  return p;
}

cplx evaluate_at(const TrigPoly& p, double x) {
  cplx s(0.0, 0.0);
  for (const Term& t : p.terms()) {
    const double ph = t.freq * x;
    s += t.coef * cplx(std::cos(ph), std::sin(ph));
  }
  return s;
}

std::vector<cplx> evaluate(const TrigPoly& p, const SampleGrid& g) {
  std::vector<cplx> out(static_cast<std::size_t>(g.count));
  for (std::int64_t j = 0; j < g.count; ++j) out[static_cast<std::size_t>(j)] = evaluate_at(p, g.point(j));
  return out;
}

TrigPoly symmetric_partial_sum(const TrigPoly& p, double eta) {
  if (!(eta > 0.0)) throw InputContractError("symmetric_partial_sum requires eta > 0");
  std::vector<Term> kept;
  for (const Term& t : p.terms())
    if (std::abs(t.freq) < eta) kept.push_back(t);
  return TrigPoly(std::move(kept));
}

double maximal_at(const TrigPoly& p, double x) {
  return maximal_at_grouped(p, group_by_modulus(p), x);
}

std::vector<double> maximal_function(const TrigPoly& p, const SampleGrid& g) {
  const Groups gr = group_by_modulus(p);
  std::vector<double> out(static_cast<std::size_t>(g.count));
  for (std::int64_t j = 0; j < g.count; ++j)
    out[static_cast<std::size_t>(j)] = maximal_at_grouped(p, gr, g.point(j));
  return out;
}

double a_norm(const TrigPoly& p) {
  double s = 0.0;
  for (const Term& t : p.terms()) s += std::abs(t.coef);
  return s;
}

double degree(const TrigPoly& p) {
  double d = 0.0;
  for (const Term& t : p.terms()) d = std::max(d, std::abs(t.freq));
  return d;
}

double max_coefficient(const TrigPoly& p) {
  double m = 0.0;
  for (const Term& t : p.terms()) m = std::max(m, std::abs(t.coef));
  return m;
}

bool has_integer_spectrum(const TrigPoly& p, double tol) {
  return std::all_of(p.terms().begin(), p.terms().end(), [tol](const Term& t) {
    return std::abs(t.freq - std::nearbyint(t.freq)) <= tol;
  });
}

UNormEstimate u_norm_details(const TrigPoly& p, const SampleGrid& g, const UNormOptions& opt) {
  if (g.length() < 2.0 * std::numbers::pi * opt.refinement * (1.0 - 1e-12))
    throw InputContractError("u_norm_estimate needs a window of length >= 2 pi * refinement");
  UNormEstimate est;
  est.grid = g;
  const double work = static_cast<double>(p.size()) * static_cast<double>(g.count);
  if (work > opt.exact_work_budget && is_circle(g) && has_integer_spectrum(p)) {
    const Groups gr = group_by_modulus(p);
    const std::size_t ngroups = gr.start.size() - 1;
    std::vector<double> ga(ngroups, 0.0);
    double total = 0.0;
    for (std::size_t gi = 0; gi < ngroups; ++gi) {
      for (std::size_t i = gr.start[gi]; i < gr.start[gi + 1]; ++i)
        ga[gi] += std::abs(p.terms()[gr.order[i]].coef);
      total += ga[gi];
    }
    const double target = total / static_cast<double>(std::max<std::int64_t>(1, opt.max_checkpoints));
    // Chunk ends, each a checkpoint; within a chunk the missed prefixes differ
    // from the chunk start by at most the chunk's A-norm minus its last group.
    std::vector<std::size_t> ends;
    double acc = 0.0, gap = 0.0;
    for (std::size_t gi = 0; gi < ngroups; ++gi) {
      acc += ga[gi];
      if (acc >= target || gi + 1 == ngroups) {
        gap = std::max(gap, acc - ga[gi]);
        ends.push_back(gi + 1);
        acc = 0.0;
      }
    }
    CircleAccumulator accum(g.count);
    std::vector<double> best(static_cast<std::size_t>(g.count), 0.0);
    std::size_t gi = 0;
    for (std::size_t e : ends) {
      for (; gi < e; ++gi)
        for (std::size_t i = gr.start[gi]; i < gr.start[gi + 1]; ++i) {
          const Term& t = p.terms()[gr.order[i]];
          accum.add(static_cast<std::int64_t>(std::llround(t.freq)), t.coef);
        }
      const std::vector<cplx>& v = accum.values();
      for (std::size_t j = 0; j < best.size(); ++j) best[j] = std::max(best[j], std::abs(v[j]));
    }
    est.value = best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
    est.gap = gap;
    est.exact = gap == 0.0;
    est.checkpoints = static_cast<std::int64_t>(ends.size());
    return est;
  }
  const std::vector<double> m = maximal_function(p, g);
  est.value = m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
  est.checkpoints = static_cast<std::int64_t>(p.size());
  return est;
}

double u_norm_estimate(const TrigPoly& p, const SampleGrid& g, const UNormOptions& opt) {
  return u_norm_details(p, g, opt).value;
}

TrigPoly dilate(const TrigPoly& p, std::int64_t n) {
  if (n < 1) throw InputContractError("dilate requires N >= 1");
  std::vector<Term> t = p.terms();
  for (Term& x : t) x.freq *= static_cast<double>(n);
  return TrigPoly(std::move(t));
}

TrigPoly multiply(const TrigPoly& p, const TrigPoly& q) {
  std::vector<Term> t;
  t.reserve(p.size() * q.size());
  for (const Term& x : p.terms())
    for (const Term& y : q.terms()) t.push_back({x.freq + y.freq, x.coef * y.coef});
  return TrigPoly::merged(std::move(t), kMergeTol);
}

TrigPoly add(const TrigPoly& p, const TrigPoly& q) {
  std::vector<Term> t = p.terms();
  t.insert(t.end(), q.terms().begin(), q.terms().end());
  return TrigPoly::merged(std::move(t), kMergeTol);
}

TrigPoly scale(const TrigPoly& p, cplx c) {
  std::vector<Term> t = p.terms();
  for (Term& x : t) x.coef *= c;
  return TrigPoly(std::move(t));
}

nlohmann::json to_json(const TrigPoly& p) {
  nlohmann::json a = nlohmann::json::array();
  for (const Term& t : p.terms()) a.push_back({{"freq", t.freq}, {"re", t.coef.real()}, {"im", t.coef.imag()}});
  return a;
}

TrigPoly trigpoly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputContractError("trigpoly JSON must be an array");
  std::vector<Term> t;
  t.reserve(j.size());
  for (const auto& e : j)
    t.push_back({e.at("freq").get<double>(), cplx(e.at("re").get<double>(), e.at("im").get<double>())});
  return TrigPoly(std::move(t));
}

nlohmann::json to_json(const SampleGrid& g) { return {{"a", g.a}, {"b", g.b}, {"count", g.count}}; }

SampleGrid grid_from_json(const nlohmann::json& j) {
  return SampleGrid::make(j.at("a").get<double>(), j.at("b").get<double>(), j.at("count").get<std::int64_t>());
}

}  // namespace nhs
