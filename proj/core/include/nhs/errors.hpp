#pragma once

#include <stdexcept>
#include <string>

namespace nhs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (length mismatch, bad window, ...).
struct InputContractError : Error {
  using Error::Error;
};

struct GenerationFailed : Error {
  using Error::Error;
};

struct NonIntegerSpectrum : Error {
  using Error::Error;
};

struct InvalidRho : Error {
  using Error::Error;
};

struct PoolTooSmall : Error {
  using Error::Error;
};

struct OutOfMaterializedRange : Error {
  using Error::Error;
};

// Integer bookkeeping (b_l, block indices) left the exactly representable range.
struct PlanOverflow : Error {
  using Error::Error;
};

}  // namespace nhs
