#include "nhs/singer.hpp"

#include <array>

#include "nhs/errors.hpp"

namespace nhs {

namespace {

using Poly3 = std::array<std::int64_t, 3>;  // c0 + c1 x + c2 x^2

struct Field {
  std::int64_t q;
  Poly3 f;  // x^3 = -(f0 + f1 x + f2 x^2)

  Poly3 mul(const Poly3& a, const Poly3& b) const {
    std::array<std::int64_t, 5> r{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % q;
    for (int k = 4; k >= 3; --k) {
      const std::int64_t c = r[k];
      if (!c) continue;
      r[k] = 0;
      for (int i = 0; i < 3; ++i) r[k - 3 + i] = ((r[k - 3 + i] - c * f[i]) % q + q) % q;
    }
    return {r[0], r[1], r[2]};
  }

  Poly3 pow_x(std::int64_t e) const {
    Poly3 res{1, 0, 0}, base{0, 1, 0};
    while (e) {
      if (e & 1) res = mul(res, base);
      base = mul(base, base);
      e >>= 1;
    }
    return res;
  }
};

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> f;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    f.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) f.push_back(n);
  return f;
}

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::int64_t next_prime(std::int64_t n) {
  if (n < 2) n = 2;
  while (!is_prime(n)) ++n;
  return n;
}

std::vector<std::int64_t> singer_set(std::int64_t q) {
  if (!is_prime(q)) throw InputContractError("singer_set needs a prime order");
  if (q > 3'000'000'000LL / q) throw InputContractError("singer_set order too large");
  const std::int64_t v = q * q + q + 1;
  const std::int64_t order = (q - 1) * v;
  std::vector<std::int64_t> fac = prime_factors(q - 1);
  for (std::int64_t p : prime_factors(v)) fac.push_back(p);

  const std::vector<std::int64_t> fac_q = prime_factors(q - 1);
  for (std::int64_t f0 = 1; f0 < q; ++f0) {
    // -f0 is the norm of a root, so it must generate F_q^*.
    const std::int64_t norm = q - f0;
    bool generator = true;
    for (std::int64_t p : fac_q)
      if (pow_mod(norm, (q - 1) / p, q) == 1) generator = false;
    if (!generator && q > 2) continue;
    for (std::int64_t f1 = 0; f1 < q; ++f1)
      for (std::int64_t f2 = 0; f2 < q; ++f2) {
        const Field F{q, {f0, f1, f2}};
        if (F.pow_x(order) != Poly3{1, 0, 0}) continue;
        bool primitive = true;
        for (std::int64_t p : fac)
          if (F.pow_x(order / p) == Poly3{1, 0, 0}) {
            primitive = false;
            break;
          }
        if (!primitive) continue;

        std::vector<std::int64_t> s;
        s.reserve(static_cast<std::size_t>(q + 1));
        std::int64_t c0 = 1, c1 = 0, c2 = 0;
        for (std::int64_t i = 0; i < v; ++i) {
          if (c2 == 0) s.push_back(i);
          // multiply by x
          const std::int64_t t = c2;
          c2 = ((c1 - t * f2) % q + q) % q;
          c1 = ((c0 - t * f1) % q + q) % q;
          c0 = ((-t * f0) % q + q) % q;
        }
        if (static_cast<std::int64_t>(s.size()) != q + 1)
          throw GenerationFailed("singer set has unexpected size");
        return s;
      }
  }
  throw GenerationFailed("no primitive cubic found");
}

}  // namespace nhs
