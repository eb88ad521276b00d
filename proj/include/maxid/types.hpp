#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace maxid {

// How semi-analytic integrals are evaluated: adaptive/deterministic
// quadrature where closed-form level sets exist, Monte Carlo otherwise.
struct QuadratureSpec {
  enum Method { kAdaptive, kMonteCarlo } method = kAdaptive;
  int mc_samples = 100000;
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
};

// Registry of admissible psi functions for the flow integral test.
struct PsiSpec {
  enum Kind { kTruncSquare, kInvExp, kExpDecay, kGaussDecay } kind =
      kTruncSquare;
  double rate = 1.0;

  double operator()(double x) const {
    switch (kind) {
      case kTruncSquare:
        return std::min(1.0, x * x);
      case kInvExp:
        return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
      case kExpDecay:
        return std::exp(-rate * x);
      case kGaussDecay:
        return std::exp(-rate * x * x);
    }
    throw std::logic_error("unreachable");
  }

  std::string name() const {
    switch (kind) {
      case kTruncSquare:
        return "min(1,x^2)";
      case kInvExp:
        return "exp(-1/x)";
      case kExpDecay:
        return "exp(-" + std::to_string(rate) + "*x)";
      case kGaussDecay:
        return "exp(-" + std::to_string(rate) + "*x^2)";
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace maxid
