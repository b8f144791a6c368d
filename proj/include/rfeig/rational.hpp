// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/pencil.hpp"

namespace rfeig {

enum class QuadratureRule { trapezoid, gauss_semicircle };

/// Poles p_i and weights w_i of a rational filter R(z) = sum_i w_i / (p_i - z)
/// discretizing the contour integral of the spectral projector over a disk.
struct PolesWeights {
  QuadratureRule rule = QuadratureRule::trapezoid;
  cd center;
  double radius = 1.0;
  std::size_t k = 0;
  std::vector<cd> poles;
  std::vector<cd> weights;
};

/// Midpoint-angle trapezoid quadrature: theta_i = 2(i - 1/2) pi / k,
/// p_i = c + r e^{i theta_i}, w_i = (r/k) e^{i theta_i}.  The resulting
/// filter has the closed form 1 / (1 + ((z - c)/r)^k).
PolesWeights trapezoid_rule(const DiskRegion& region, std::size_t k);

/// Gauss-Legendre quadrature with k/2 points on each semicircle of the
/// same contour parameterization.  k must be even.
PolesWeights gauss_rule(const DiskRegion& region, std::size_t k);

/// sum_i w_i / (p_i - z).  Throws on near-pole evaluation
/// (|p_i - z| < 1e-14 * r).
cd eval_sum(const PolesWeights& pw, cd z);

/// 1 / (1 + ((z - c)/r)^k).  Throws when (z-c)/r is within 1e-14 of a
/// k-th root of -1.
cd eval_compact(const DiskRegion& region, std::size_t k, cd z);

/// T(z) = (1 - z)/z; conjugates the filter value back to a pure power:
/// T(R_{c,r,k}(z)) = ((z - c)/r)^k.  Throws at z = 0.
cd mobius_T(cd z);

/// Expansion of the order-k1*k2 filter in terms of the order-k1 filter:
///   R_{k1 k2}(z) = sum_i weights[i] * (R_{k1}(z) - shifts[i])^{-1} R_{k1}(z)
///                + direct_term * R_{k1}(z)
/// with shifts s_i = 1/(1 + sigma_i) over the roots sigma_i of x^{k2} = -1.
/// For odd k2 the root sigma = -1 is excluded and direct_term = 1/k2.
struct CompositeCoeffs {
  std::size_t k2 = 0;
  std::vector<cd> shifts;
  std::vector<cd> weights;
  cd direct_term;
};

CompositeCoeffs composite_coeffs(std::size_t k2);

/// Evaluates the composite expansion above; equals
/// eval_compact(region, k1*k2, z) up to rounding.
cd eval_composite(const DiskRegion& region, std::size_t k1, std::size_t k2, cd z);

struct PoleMappingResult {
  cd filter_value;        // R_{c,r,k1}(p_i)
  double shift_distance;  // distance to the nearest shift of composite_coeffs(k2)
  bool maps_to_infinity;  // true when the pole maps to the excluded odd-k2 shift
};

/// Evaluates the inner filter at pole `pole_index` of the order-k1*k2
/// trapezoid rule and reports its distance to the shift set.
PoleMappingResult pole_mapping_check(const DiskRegion& region, std::size_t k1, std::size_t k2,
                                     std::size_t pole_index);

/// Worst-case out/in amplitude ratio of the order-k trapezoid filter over
/// the annulus |z| in [a, b]: 2 / ((b/a)^k - 1).
double separation_ratio_closed(double a, double b, std::size_t k);

/// Infimum of the ratio over all degree-k rational filters: (a/b)^k.
double optimal_ratio(double a, double b, std::size_t k);

/// Grid estimate: sup |R| over grid points with |z| >= b divided by
/// inf |R| over grid points with |z| <= a, on an inclusive grid_n x grid_n
/// grid over [-1.5, 1.5]^2 scaled by the contour.  Points within
/// 1e-12 of a pole are skipped.
double separation_ratio_grid(const PolesWeights& pw, double a, double b, std::size_t grid_n);

struct ZolotarevParams {
  double a = 0.0;
  double b = 0.0;
  double ell = 0.0;    // ((sqrt b - sqrt a)/(sqrt b + sqrt a))^2
  double gamma = 0.0;  // sqrt(ell)
  double alpha = 0.0;  // sqrt(a b)
  double beta = 0.0;   // -alpha
};

ZolotarevParams zolotarev_params(double a, double b);

/// r_k(z) = ((z - sqrt(ell)) / (z + sqrt(ell)))^k.
cd zolotarev_eval(const ZolotarevParams& p, std::size_t k, cd z);

/// r_k composed with the Mobius map sending the annulus problem to the
/// reference one, normalized so the result is exactly z^{-k}.
cd zolotarev_composed(const ZolotarevParams& p, std::size_t k, cd z);

/// ((1 + sqrt(ell)) / (1 - sqrt(ell)))^{-2k}, the attained infimum.
double zolotarev_infimum(const ZolotarevParams& p, std::size_t k);

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration on P_n).
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace rfeig
