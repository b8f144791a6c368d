// SPDX-License-Identifier: Apache-2.0
#include "rfeig/rational.hpp"

#include <cmath>
#include <limits>

namespace rfeig {

PolesWeights trapezoid_rule(const DiskRegion& region, std::size_t k) {
  if (k == 0) throw std::invalid_argument("trapezoid_rule: k must be >= 1");
  PolesWeights pw;
  pw.rule = QuadratureRule::trapezoid;
  pw.center = region.center;
  pw.radius = region.radius;
  pw.k = k;
  pw.poles.resize(k);
  pw.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    double theta = (2.0 * (static_cast<double>(i) + 0.5)) * M_PI / static_cast<double>(k);
    cd e = std::polar(1.0, theta);
    pw.poles[i] = region.center + region.radius * e;
    pw.weights[i] = (region.radius / static_cast<double>(k)) * e;
  }
  return pw;
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, refined by Newton on P_n.
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) { p1 = x; }
      for (std::size_t j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      dp = static_cast<double>(n) * (pm - x * pn) / (1.0 - x * x);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

PolesWeights gauss_rule(const DiskRegion& region, std::size_t k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("gauss_rule: k must be even and >= 2");
  std::vector<double> gln, glw;
  gauss_legendre(k / 2, gln, glw);
  PolesWeights pw;
  pw.rule = QuadratureRule::gauss_semicircle;
  pw.center = region.center;
  pw.radius = region.radius;
  pw.k = k;
  pw.poles.resize(k);
  pw.weights.resize(k);
  // Semicircle theta in (0, pi) then (pi, 2 pi); the projector integral
  // (1/2 pi i) \oint (zeta - z)^{-1} d zeta becomes per-semicircle
  // (r / 4) \int_{-1}^{1} e^{i theta(x)} / (zeta(x) - z) dx.
  for (std::size_t h = 0; h < 2; ++h) {
    for (std::size_t i = 0; i < k / 2; ++i) {
      double theta = M_PI * (gln[i] + 1.0) / 2.0 + (h == 0 ? 0.0 : M_PI);
      cd e = std::polar(1.0, theta);
      pw.poles[h * (k / 2) + i] = region.center + region.radius * e;
      pw.weights[h * (k / 2) + i] = (region.radius / 4.0) * glw[i] * e;
    }
  }
  return pw;
}

cd eval_sum(const PolesWeights& pw, cd z) {
  cd s(0.0, 0.0);
  for (std::size_t i = 0; i < pw.k; ++i) {
    cd d = pw.poles[i] - z;
    if (std::abs(d) < 1e-14 * pw.radius) throw NumericalError("eval_sum: near-pole evaluation");
    s += pw.weights[i] / d;
  }
  return s;
}

cd eval_compact(const DiskRegion& region, std::size_t k, cd z) {
  cd y = (z - region.center) / region.radius;
  cd yk = std::pow(y, static_cast<double>(k));
  cd den = 1.0 + yk;
  if (std::abs(den) < 1e-14) throw NumericalError("eval_compact: near-pole evaluation");
  return 1.0 / den;
}

cd mobius_T(cd z) {
  if (z == cd(0.0, 0.0)) throw NumericalError("mobius_T: pole at z = 0");
  return (1.0 - z) / z;
}

CompositeCoeffs composite_coeffs(std::size_t k2) {
  if (k2 == 0) throw std::invalid_argument("composite_coeffs: k2 must be >= 1");
  CompositeCoeffs cc;
  cc.k2 = k2;
  cc.direct_term = (k2 % 2 == 1) ? cd(1.0 / static_cast<double>(k2), 0.0) : cd(0.0, 0.0);
  for (std::size_t i = 1; i <= k2; ++i) {
    if (k2 % 2 == 1 && 2 * i - 1 == k2) continue;  // sigma = -1: the direct term
    double ang = M_PI * (2.0 * static_cast<double>(i) - 1.0) / static_cast<double>(k2);
    cd sigma = std::polar(1.0, ang);
    cd s = 1.0 / (1.0 + sigma);
    cc.shifts.push_back(s);
    cc.weights.push_back((1.0 - s) / static_cast<double>(k2));
  }
  return cc;
}

cd eval_composite(const DiskRegion& region, std::size_t k1, std::size_t k2, cd z) {
  cd r1 = eval_compact(region, k1, z);
  CompositeCoeffs cc = composite_coeffs(k2);
  cd s = cc.direct_term * r1;
  for (std::size_t i = 0; i < cc.shifts.size(); ++i) {
    cd d = r1 - cc.shifts[i];
    if (std::abs(d) < 1e-300) throw NumericalError("eval_composite: shift coincidence");
    s += cc.weights[i] * r1 / d;
  }
  return s;
}

PoleMappingResult pole_mapping_check(const DiskRegion& region, std::size_t k1, std::size_t k2,
                                     std::size_t pole_index) {
  PolesWeights pw = trapezoid_rule(region, k1 * k2);
  if (pole_index >= pw.k) throw std::invalid_argument("pole_mapping_check: pole index");
  cd y = (pw.poles[pole_index] - region.center) / region.radius;
  cd yk1 = std::pow(y, static_cast<double>(k1));
  PoleMappingResult res;
  if (std::abs(1.0 + yk1) < 1e-10) {
    res.maps_to_infinity = true;
    res.filter_value = cd(std::numeric_limits<double>::infinity(), 0.0);
    res.shift_distance = std::numeric_limits<double>::infinity();
    return res;
  }
  res.maps_to_infinity = false;
  res.filter_value = 1.0 / (1.0 + yk1);
  CompositeCoeffs cc = composite_coeffs(k2);
  double best = std::numeric_limits<double>::infinity();
  for (cd s : cc.shifts) best = std::min(best, std::abs(res.filter_value - s));
  res.shift_distance = best;
  return res;
}

double separation_ratio_closed(double a, double b, std::size_t k) {
  if (!(0.0 < a && a < b)) throw std::invalid_argument("separation_ratio_closed: need 0 < a < b");
  return 2.0 / (std::pow(b / a, static_cast<double>(k)) - 1.0);
}

double optimal_ratio(double a, double b, std::size_t k) {
  if (!(0.0 < a && a < b)) throw std::invalid_argument("optimal_ratio: need 0 < a < b");
  return std::pow(a / b, static_cast<double>(k));
}

double separation_ratio_grid(const PolesWeights& pw, double a, double b, std::size_t grid_n) {
  if (grid_n < 2) throw std::invalid_argument("separation_ratio_grid: grid_n >= 2");
  double sup_out = 0.0;
  double inf_in = std::numeric_limits<double>::infinity();
  // widen the box when the outer circle would not fit inside it
  const double hw = std::max(1.5, 1.25 * b);
  for (std::size_t iy = 0; iy < grid_n; ++iy) {
    double y = -hw + 2.0 * hw * static_cast<double>(iy) / static_cast<double>(grid_n - 1);
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      double x = -hw + 2.0 * hw * static_cast<double>(ix) / static_cast<double>(grid_n - 1);
      double rho = std::hypot(x, y);
      if (rho > a && rho < b) continue;
      cd z = pw.center + pw.radius * cd(x, y);
      double v;
      try {
        v = std::abs(eval_sum(pw, z));
      } catch (const NumericalError&) {
        continue;  // grid point on a pole
      }
      if (rho >= b) sup_out = std::max(sup_out, v);
      else inf_in = std::min(inf_in, v);
    }
  }
  if (inf_in == 0.0 || !std::isfinite(inf_in))
    throw NumericalError("separation_ratio_grid: degenerate inner infimum");
  return sup_out / inf_in;
}

ZolotarevParams zolotarev_params(double a, double b) {
  if (!(0.0 < a && a < b)) throw std::invalid_argument("zolotarev_params: need 0 < a < b");
  ZolotarevParams p;
  p.a = a;
  p.b = b;
  double sa = std::sqrt(a), sb = std::sqrt(b);
  p.gamma = (sb - sa) / (sb + sa);
  p.ell = p.gamma * p.gamma;
  p.alpha = std::sqrt(a * b);
  p.beta = -p.alpha;
  return p;
}

cd zolotarev_eval(const ZolotarevParams& p, std::size_t k, cd z) {
  double g = std::sqrt(p.ell);
  cd den = z + g;
  if (std::abs(den) < 1e-300) throw NumericalError("zolotarev_eval: pole at -sqrt(ell)");
  return std::pow((z - g) / den, static_cast<double>(k));
}

cd zolotarev_composed(const ZolotarevParams& p, std::size_t k, cd z) {
  // T(z) = gamma (z - alpha)/(z + alpha) maps the annulus problem onto the
  // reference interval pair; r_k(T(z)) = (-alpha/z)^k, normalized to z^{-k}.
  double g = std::sqrt(p.ell);
  cd den = z + p.alpha;
  if (std::abs(den) < 1e-300) throw NumericalError("zolotarev_composed: pole of the map");
  cd t = g * (z - p.alpha) / den;
  cd v = zolotarev_eval(p, k, t);
  return v / std::pow(cd(-p.alpha, 0.0), static_cast<double>(k));
}

double zolotarev_infimum(const ZolotarevParams& p, std::size_t k) {
  double g = std::sqrt(p.ell);
  return std::pow((1.0 + g) / (1.0 - g), -2.0 * static_cast<double>(k));
}

}  // namespace rfeig
