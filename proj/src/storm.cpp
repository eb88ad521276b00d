#include "maxid/storm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace maxid {

void StormProfile::validate() const {
  if (!(height > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("storm: height and scale must be positive");
  if (shape == kTable) {
    if (table_t.size() != table_v.size() || table_t.size() < 2)
      throw std::invalid_argument("storm table: need >= 2 grid points");
    for (size_t i = 1; i < table_t.size(); ++i) {
      if (!(table_t[i] > table_t[i - 1]))
        throw std::invalid_argument("storm table: grid must increase");
      if (table_v[i] > table_v[i - 1])
        throw std::invalid_argument("storm table: profile must not increase");
    }
    if (table_v.back() != 0.0)
      throw std::invalid_argument("storm table: must decay to 0");
  }
}

double StormProfile::eval(double t) const {
  double r = std::abs(t);
  switch (shape) {
    case kExpBump:
      return height * std::exp(-r / scale);
    case kIndicator:
      return r <= scale ? height : 0.0;
    case kTable: {
      if (r >= table_t.back()) return 0.0;
      auto it = std::upper_bound(table_t.begin(), table_t.end(), r);
      size_t i = static_cast<size_t>(it - table_t.begin());
      if (i == 0) return table_v.front();
      double w = (r - table_t[i - 1]) / (table_t[i] - table_t[i - 1]);
      return table_v[i - 1] + w * (table_v[i] - table_v[i - 1]);
    }
  }
  throw std::logic_error("unreachable");
}

double StormProfile::level_radius(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("level_radius: a must be > 0");
  switch (shape) {
    case kExpBump:
      return a > height ? 0.0 : scale * std::log(height / a);
    case kIndicator:
      return a > height ? 0.0 : scale;
    case kTable: {
      if (a > table_v.front()) return 0.0;
      for (size_t i = 1; i < table_t.size(); ++i) {
        if (table_v[i] < a) {
          double w = (table_v[i - 1] - a) / (table_v[i - 1] - table_v[i]);
          return table_t[i - 1] + w * (table_t[i] - table_t[i - 1]);
        }
      }
      return table_t.back();
    }
  }
  throw std::logic_error("unreachable");
}

double StormProfile::alpha_integral(double alpha) const {
  switch (shape) {
    case kExpBump:
      return 2.0 * scale * std::pow(height, alpha) / alpha;
    case kIndicator:
      return 2.0 * scale * std::pow(height, alpha);
    case kTable: {
      // trapezoid on the table grid, doubled for symmetry
      double s = 0.0;
      for (size_t i = 1; i < table_t.size(); ++i)
        s += 0.5 * (std::pow(table_v[i - 1], alpha) +
                    std::pow(table_v[i], alpha)) *
             (table_t[i] - table_t[i - 1]);
      return 2.0 * s;
    }
  }
  throw std::logic_error("unreachable");
}

double StormProfile::alpha_tail_integral(double alpha, double r0) const {
  if (r0 <= 0.0) return alpha_integral(alpha);
  switch (shape) {
    case kExpBump:
      return 2.0 * scale * std::pow(height, alpha) *
             std::exp(-alpha * r0 / scale) / alpha;
    case kIndicator:
      return r0 >= scale ? 0.0
                         : 2.0 * std::pow(height, alpha) * (scale - r0);
    case kTable: {
      double s = 0.0;
      for (size_t i = 1; i < table_t.size(); ++i) {
        double a = std::max(table_t[i - 1], r0), b = table_t[i];
        if (b <= a) continue;
        double va = eval(a), vb = eval(b);
        s += 0.5 * (std::pow(va, alpha) + std::pow(vb, alpha)) * (b - a);
      }
      return 2.0 * s;
    }
  }
  throw std::logic_error("unreachable");
}

double ball_volume(int d, double r) {
  if (r <= 0.0) return 0.0;
  double logv = 0.5 * d * std::log(std::numbers::pi) -
                std::lgamma(0.5 * d + 1.0) + d * std::log(r);
  return std::exp(logv);
}

double interval_union_measure(std::vector<std::pair<double, double>> iv) {
  std::erase_if(iv, [](const auto& p) { return !(p.second > p.first); });
  std::sort(iv.begin(), iv.end());
  double total = 0.0, hi = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : iv) {
    double lo = std::max(a, hi);
    if (b > lo) total += b - lo;
    hi = std::max(hi, b);
  }
  return total;
}

}  // namespace maxid
