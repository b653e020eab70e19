#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace pform::holonomy {

/**
 * Closed 3-manifold embedded in R^n, foliated by (sigma1, sigma2, tau) in
 * [0,2pi)^3, with analytic derivatives.  The induced surface element is
 * s^{mu nu} = eps^{ij} (dx^mu/dsigma^i)(dx^nu/dsigma^j).
 */
struct EmbeddedFoliation {
  int n = 0;
  std::array<int, 3> grid = {32, 32, 32};
  // x, d/dsigma1, d/dsigma2, d/dtau as functions of (sigma1, sigma2, tau)
  std::function<std::vector<double>(double, double, double)> x, d1, d2, dt;

  std::vector<std::vector<double>> induced_s(double s1, double s2, double t) const;
};

/** Product-of-circles torus (cos s1, sin s1, cos s2, sin s2, cos t, sin t) in R^6. */
EmbeddedFoliation clifford3torus(const std::array<int, 3>& grid);

/** Named factory for the CLI ("clifford3torus"). */
EmbeddedFoliation make_embedding(const std::string& name, const std::array<int, 3>& grid);

/** Real connection components a_mu(x, s); the holonomy is exp(i * integral). */
using ConnectionEval =
    std::function<std::vector<double>(const std::vector<double>&, const std::vector<std::vector<double>>&)>;

/** Integral I = ∫ d2sigma dtau a_mu(x,s) dx^mu/dtau (trapezoid on the periodic grid). */
double holonomy_integral(const ConnectionEval& a, const EmbeddedFoliation& f);

/** W(Sigma) = exp(i I). */
std::complex<double> holonomy_abelian(const ConnectionEval& a, const EmbeddedFoliation& f);

/** Gauge parameter with analytic x-gradient (s-dependence allowed in value). */
struct GaugeParameter {
  // gradient d_mu X(x, s) at fixed s
  std::function<std::vector<double>(const std::vector<double>&, const std::vector<std::vector<double>>&)> grad;
};

/** |delta log W| under A -> A + dX; vanishes on closed surfaces. */
double gauge_invariance_probe(const GaugeParameter& x, const EmbeddedFoliation& f);

/** Constant-coefficient or polynomial three-form A_{mu nu rho}(x). */
struct ThreeFormEval {
  int n = 0;
  // value of A_{mu nu rho} at x (totally antisymmetric in the indices)
  std::function<double(int, int, int, const std::vector<double>&)> comp;
};

/** Connection a_mu(x,s) = A_{mu nu rho}(x) s^{nu rho} in the special gauge. */
ConnectionEval special_gauge_connection(const ThreeFormEval& a3);

/** Pullback integral of the three-form (unnormalised component-sum convention). */
double threeform_integral(const ThreeFormEval& a3, const EmbeddedFoliation& f);

struct ConstantProbeResult {
  std::vector<double> ratios;  // log-holonomy / form-integral per sample
  double max_deviation = 0;    // max pairwise spread of the ratios
  double fitted_c = 0;
};

/** Ratio log W / ∫A must be A-independent; throws on vanishing denominators. */
ConstantProbeResult special_gauge_constant_probe(const std::vector<ThreeFormEval>& samples,
                                                 const EmbeddedFoliation& f);

}  // namespace pform::holonomy
