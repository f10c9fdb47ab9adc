#include "nhs/fold.hpp"

#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "nhs/errors.hpp"

namespace nhs {

CircleAccumulator::CircleAccumulator(std::int64_t count)
    : n_(count), bins_(static_cast<std::size_t>(count)), work_(static_cast<std::size_t>(count)),
      out_(static_cast<std::size_t>(count)) {
  if (count < 1) throw InputContractError("CircleAccumulator needs count >= 1");
  plan_ = fftw_plan_dft_1d(static_cast<int>(count), reinterpret_cast<fftw_complex*>(work_.data()),
                           reinterpret_cast<fftw_complex*>(out_.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
}

CircleAccumulator::~CircleAccumulator() {
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void CircleAccumulator::add(std::int64_t k, cplx c) {
  const std::int64_t two_n = 2 * n_;
  std::int64_t r = k % two_n;
  if (r < 0) r += two_n;
  const double ph = std::numbers::pi * static_cast<double>(r) / static_cast<double>(n_);
  std::int64_t bin = k % n_;
  if (bin < 0) bin += n_;
  bins_[static_cast<std::size_t>(bin)] += c * cplx(std::cos(ph), std::sin(ph));
}

const std::vector<cplx>& CircleAccumulator::values() {
  work_ = bins_;
  fftw_execute(static_cast<fftw_plan>(plan_));
  return out_;
}

std::vector<cplx> circle_values(const TrigPoly& p, std::int64_t count) {
  if (!has_integer_spectrum(p)) throw NonIntegerSpectrum("circle evaluation needs an integer spectrum");
  CircleAccumulator acc(count);
  for (const Term& t : p.terms()) acc.add(static_cast<std::int64_t>(std::llround(t.freq)), t.coef);
  return acc.values();
}

}  // namespace nhs
