#pragma once

#include <cstdint>
#include <vector>

namespace nhs {

bool is_prime(std::int64_t n);
std::int64_t next_prime(std::int64_t n);  // smallest prime >= n

// Perfect difference set of size q+1 in Z_v, v = q^2+q+1, for prime q:
// exponents i in [0, v) with x^i mod f having no x^2 term, f the
// lexicographically first primitive monic cubic over GF(q).
std::vector<std::int64_t> singer_set(std::int64_t q);

}  // namespace nhs
