#pragma once

// Textbook reference implementations written straight from the formulas,
// sharing no code with the library. Tests compare the library against these.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct Table {
  double a, b, c, d;  // treatment events/non-events, control events/non-events
};

/// w_i = S_i / sum S, S = B + (100 - B) f, f = (e^{-g p} - e^{-g P}) / (1 - e^{-g P}).
inline std::vector<double> eligibility_weights(const std::vector<double>& penalties, double gamma,
                                               double floor_b, double pmax) {
  std::vector<double> s;
  double total = 0.0;
  for (double p : penalties) {
    const double top = std::exp(-gamma * p) - std::exp(-gamma * pmax);
    const double bottom = 1.0 - std::exp(-gamma * pmax);
    double f = top / bottom;
    if (f < 0.0) f = 0.0;
    s.push_back(floor_b + (100.0 - floor_b) * f);
    total += s.back();
  }
  for (double& v : s) v /= total;
  return s;
}

struct Pooled {
  double theta, var, low, high;
};

/// Mantel-Haenszel risk ratio with Robins-Breslow-Greenland style variance,
/// accumulated term by term as in a statistics textbook.
inline Pooled mantel_haenszel(const std::vector<Table>& tables, const std::vector<double>& w,
                              double z = 1.96) {
  double num = 0.0, den = 0.0, var_num = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Table& t = tables[i];
    const double n1 = t.a + t.b;
    const double n0 = t.c + t.d;
    const double n = n1 + n0;
    num += w[i] * t.a * n0 / n;
    den += w[i] * t.c * n1 / n;
    var_num += w[i] * w[i] * (t.a + t.d) * t.b * t.c / (n * n);
  }
  Pooled p{};
  p.theta = num / den;
  p.var = var_num / (2.0 * num * den);
  p.low = std::exp(std::log(p.theta) - z * std::sqrt(p.var));
  p.high = std::exp(std::log(p.theta) + z * std::sqrt(p.var));
  return p;
}

/// Percent shares of w c n1 / n.
inline std::vector<double> display_percent(const std::vector<Table>& tables, const std::vector<double>& w) {
  std::vector<double> out;
  double total = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Table& t = tables[i];
    out.push_back(w[i] * t.c * (t.a + t.b) / (t.a + t.b + t.c + t.d));
    total += out.back();
  }
  for (double& v : out) v = 100.0 * v / total;
  return out;
}

struct RiskRatio {
  double rr, low, high;
};

inline RiskRatio risk_ratio(const Table& t, double z = 1.96) {
  const double n1 = t.a + t.b, n0 = t.c + t.d;
  const double rr = (t.a / n1) / (t.c / n0);
  const double se = std::sqrt(1.0 / t.a - 1.0 / n1 + 1.0 / t.c - 1.0 / n0);
  return {rr, std::exp(std::log(rr) - z * se), std::exp(std::log(rr) + z * se)};
}

/// Round half away from zero at `digits` decimals, as a printed table does.
inline double round_to(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

}  // namespace oracle
