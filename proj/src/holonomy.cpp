#include "pform/holonomy.hpp"

#include <cmath>
#include <stdexcept>

namespace pform::holonomy {

std::vector<std::vector<double>> EmbeddedFoliation::induced_s(double s1, double s2,
                                                              double t) const {
  auto e1 = d1(s1, s2, t);
  auto e2 = d2(s1, s2, t);
  std::vector<std::vector<double>> s(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      s[static_cast<size_t>(mu)][static_cast<size_t>(nu)] =
          e1[static_cast<size_t>(mu)] * e2[static_cast<size_t>(nu)] -
          e2[static_cast<size_t>(mu)] * e1[static_cast<size_t>(nu)];
  return s;
}

EmbeddedFoliation clifford3torus(const std::array<int, 3>& grid) {
  EmbeddedFoliation f;
  f.n = 6;
  f.grid = grid;
  f.x = [](double a, double b, double t) {
    return std::vector<double>{std::cos(a), std::sin(a), std::cos(b),
                               std::sin(b), std::cos(t), std::sin(t)};
  };
  f.d1 = [](double a, double, double) {
    return std::vector<double>{-std::sin(a), std::cos(a), 0, 0, 0, 0};
  };
  f.d2 = [](double, double b, double) {
    return std::vector<double>{0, 0, -std::sin(b), std::cos(b), 0, 0};
  };
  f.dt = [](double, double, double t) {
    return std::vector<double>{0, 0, 0, 0, -std::sin(t), std::cos(t)};
  };
  return f;
}

EmbeddedFoliation make_embedding(const std::string& name, const std::array<int, 3>& grid) {
  if (name == "clifford3torus") return clifford3torus(grid);
  throw std::invalid_argument("unknown embedding: " + name);
}

namespace {

// deterministic triple Riemann/trapezoid sum over the periodic grid,
// accumulated tau-slice by tau-slice
double periodic_integral(const EmbeddedFoliation& f,
                         const std::function<double(double, double, double)>& g) {
  const auto [n1, n2, n3] = f.grid;
  if (n1 < 2 || n2 < 2 || n3 < 2) throw std::invalid_argument("holonomy grid too small");
  const double h1 = 2 * M_PI / n1, h2 = 2 * M_PI / n2, h3 = 2 * M_PI / n3;
  std::vector<double> slices(static_cast<size_t>(n3), 0.0);
  for (int k = 0; k < n3; ++k) {
    double acc = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) acc += g(i * h1, j * h2, k * h3);
    slices[static_cast<size_t>(k)] = acc;
  }
  double total = 0;
  for (double s : slices) total += s;
  return total * h1 * h2 * h3;
}

}  // namespace

double holonomy_integral(const ConnectionEval& a, const EmbeddedFoliation& f) {
  return periodic_integral(f, [&](double s1, double s2, double t) {
    auto x = f.x(s1, s2, t);
    auto s = f.induced_s(s1, s2, t);
    auto comps = a(x, s);
    auto v = f.dt(s1, s2, t);
    double acc = 0;
    for (int mu = 0; mu < f.n; ++mu)
      acc += comps[static_cast<size_t>(mu)] * v[static_cast<size_t>(mu)];
    return acc;
  });
}

std::complex<double> holonomy_abelian(const ConnectionEval& a, const EmbeddedFoliation& f) {
  double integral = holonomy_integral(a, f);
  return std::complex<double>(std::cos(integral), std::sin(integral));
}

double gauge_invariance_probe(const GaugeParameter& x, const EmbeddedFoliation& f) {
  double delta = periodic_integral(f, [&](double s1, double s2, double t) {
    auto pt = f.x(s1, s2, t);
    auto s = f.induced_s(s1, s2, t);
    auto grad = x.grad(pt, s);
    auto v = f.dt(s1, s2, t);
    double acc = 0;
    for (int mu = 0; mu < f.n; ++mu)
      acc += grad[static_cast<size_t>(mu)] * v[static_cast<size_t>(mu)];
    return acc;
  });
  return std::abs(delta);
}

ConnectionEval special_gauge_connection(const ThreeFormEval& a3) {
  return [a3](const std::vector<double>& x, const std::vector<std::vector<double>>& s) {
    const int n = a3.n;
    std::vector<double> comps(static_cast<size_t>(n), 0.0);
    for (int mu = 0; mu < n; ++mu) {
      double acc = 0;
      for (int nu = 0; nu < n; ++nu)
        for (int rho = nu + 1; rho < n; ++rho)
          acc += 2.0 * a3.comp(mu, nu, rho, x) * s[static_cast<size_t>(nu)][static_cast<size_t>(rho)];
      comps[static_cast<size_t>(mu)] = acc;
    }
    return comps;
  };
}

double threeform_integral(const ThreeFormEval& a3, const EmbeddedFoliation& f) {
  return periodic_integral(f, [&](double s1, double s2, double t) {
    auto x = f.x(s1, s2, t);
    auto e1 = f.d1(s1, s2, t);
    auto e2 = f.d2(s1, s2, t);
    auto et = f.dt(s1, s2, t);
    // sum over all index triples of A_{mu nu rho} det d(x^mu,x^nu,x^rho)/d(s1,s2,t)
    // = 6 A(e1, e2, et) for totally antisymmetric A
    double acc = 0;
    for (int mu = 0; mu < f.n; ++mu)
      for (int nu = mu + 1; nu < f.n; ++nu)
        for (int rho = nu + 1; rho < f.n; ++rho) {
          double det = e1[static_cast<size_t>(mu)] * (e2[static_cast<size_t>(nu)] * et[static_cast<size_t>(rho)] -
                                                      e2[static_cast<size_t>(rho)] * et[static_cast<size_t>(nu)]) -
                       e1[static_cast<size_t>(nu)] * (e2[static_cast<size_t>(mu)] * et[static_cast<size_t>(rho)] -
                                                      e2[static_cast<size_t>(rho)] * et[static_cast<size_t>(mu)]) +
                       e1[static_cast<size_t>(rho)] * (e2[static_cast<size_t>(mu)] * et[static_cast<size_t>(nu)] -
                                                       e2[static_cast<size_t>(nu)] * et[static_cast<size_t>(mu)]);
          acc += 6.0 * a3.comp(mu, nu, rho, x) * det;
        }
    return acc;
  });
}

ConstantProbeResult special_gauge_constant_probe(const std::vector<ThreeFormEval>& samples,
                                                 const EmbeddedFoliation& f) {
  if (samples.size() < 2)
    throw std::invalid_argument("constant probe needs at least two three-forms");
  ConstantProbeResult out;
  for (const auto& a3 : samples) {
    double num = holonomy_integral(special_gauge_connection(a3), f);
    double den = threeform_integral(a3, f);
    if (std::abs(den) < 1e-10)
      throw std::domain_error("constant probe: vanishing three-form integral");
    out.ratios.push_back(num / den);
  }
  double mean = 0;
  for (double r : out.ratios) mean += r;
  mean /= static_cast<double>(out.ratios.size());
  out.fitted_c = mean;
  for (double r : out.ratios)
    for (double q : out.ratios) out.max_deviation = std::max(out.max_deviation, std::abs(r - q));
  return out;
}

}  // namespace pform::holonomy
