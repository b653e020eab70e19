#include "pform/gerbejet.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pform::gerbejet {

namespace {

RatMat rat_kron(const RatMat& a, const RatMat& b) {
  RatMat out(a.rows * b.rows, a.cols * b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      if (a(i, j) == 0) continue;
      for (int k = 0; k < b.rows; ++k)
        for (int l = 0; l < b.cols; ++l)
          out(i * b.rows + k, j * b.cols + l) = a(i, j) * b(k, l);
    }
  return out;
}

}  // namespace

ModuleRep trivial_module(const JetSpace& sp, const liealg::RationalAlgebra& g, const Rat& lambda) {
  ModuleRep m;
  m.sp = sp;
  m.g = g;
  m.wdim = g.d;
  m.name = "trivial";
  m.T.assign(static_cast<size_t>(sp.n) * sp.n, RatMat::zero(g.d, g.d));
  m.J = g.J;
  m.Lambda = lambda * RatMat::identity(g.d);
  return m;
}

ModuleRep vector_module(const JetSpace& sp, const liealg::RationalAlgebra& g, const Rat& lambda) {
  ModuleRep m;
  m.sp = sp;
  m.g = g;
  m.wdim = sp.n * g.d;
  m.name = "vector";
  RatMat idg = RatMat::identity(g.d);
  m.T.assign(static_cast<size_t>(sp.n) * sp.n, RatMat::zero(m.wdim, m.wdim));
  for (int mu = 0; mu < sp.n; ++mu)
    for (int nu = 0; nu < sp.n; ++nu) {
      RatMat e(sp.n, sp.n);
      e(mu, nu) = 1;
      m.T[static_cast<size_t>(mu) * sp.n + nu] = rat_kron(e, idg);
    }
  RatMat idn = RatMat::identity(sp.n);
  for (const auto& j : g.J) m.J.push_back(rat_kron(idn, j));
  m.Lambda = lambda * RatMat::identity(m.wdim);
  return m;
}

ModuleRep rescale_module(const JetSpace& sp, const liealg::RationalAlgebra& g) {
  if (sp.p != 2) throw std::invalid_argument("rescale_module is shipped for p = 2");
  ModuleRep m;
  m.sp = sp;
  m.g = g;
  const int nb = sp.n + 1;  // vector block plus one weight slot
  m.wdim = nb * g.d;
  m.name = "vector-rescale";
  RatMat idg = RatMat::identity(g.d);
  RatMat idb = RatMat::identity(nb);
  m.T.assign(static_cast<size_t>(sp.n) * sp.n, RatMat::zero(m.wdim, m.wdim));
  for (int mu = 0; mu < sp.n; ++mu)
    for (int nu = 0; nu < sp.n; ++nu) {
      RatMat e(nb, nb);
      e(mu, nu) = 1;
      m.T[static_cast<size_t>(mu) * sp.n + nu] = rat_kron(e, idg);
    }
  for (const auto& j : g.J) m.J.push_back(rat_kron(idb, j));
  RatMat lam(nb, nb);
  lam(sp.n, sp.n) = -2;  // [Lambda, w] = -2 w with w = e_weight <e^tau|
  m.Lambda = rat_kron(lam, idg);
  m.U.assign(static_cast<size_t>(sp.n) * sp.svars(), RatMat::zero(m.wdim, m.wdim));
  auto w = [&](int tau) {
    RatMat out(nb, nb);
    out(sp.n, tau) = 1;
    return out;
  };
  for (int rho = 0; rho < sp.n; ++rho)
    for (int flat = 0; flat < sp.svars(); ++flat) {
      auto [sg, ta] = sp.s_pair_axes(flat);
      RatMat u(nb, nb);
      if (rho == sg) u = u + w(ta);
      if (rho == ta) u = u - w(sg);
      m.U[static_cast<size_t>(rho) * sp.svars() + flat] = rat_kron(u, idg);
    }
  return m;
}

namespace {

// U^rho_{sigma tau} with arbitrary (sigma, tau) order; zero matrix if absent.
RatMat u_pair(const ModuleRep& m, int rho, int sigma, int tau) {
  if (!m.has_U() || sigma == tau) return RatMat::zero(m.wdim, m.wdim);
  int flat = m.sp.s_pair_index(sigma, tau);
  RatMat u = m.Um(rho, flat);
  return sigma < tau ? u : Rat(-1) * u;
}

}  // namespace

std::vector<std::string> module_relation_defects(const ModuleRep& m) {
  std::vector<std::string> bad;
  const int n = m.sp.n;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  // gl(n) on T
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int rho = 0; rho < n; ++rho)
        for (int sg = 0; sg < n; ++sg) {
          RatMat lhs = rat_commutator(m.Tm(mu, nu), m.Tm(rho, sg));
          RatMat rhs = RatMat::zero(m.wdim, m.wdim);
          if (rho == nu) rhs = rhs + m.Tm(mu, sg);
          if (mu == sg) rhs = rhs - m.Tm(rho, nu);
          check(lhs == rhs, "gl(n) relation on T");
        }
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (size_t a = 0; a < m.J.size(); ++a)
        check(rat_commutator(m.Tm(mu, nu), m.J[a]).is_zero(), "[T, J] = 0");
  for (int a = 0; a < m.g.dim; ++a)
    for (int b = 0; b < m.g.dim; ++b) {
      RatMat lhs = rat_commutator(m.J[static_cast<size_t>(a)], m.J[static_cast<size_t>(b)]);
      RatMat rhs = RatMat::zero(m.wdim, m.wdim);
      for (int c = 0; c < m.g.dim; ++c)
        if (m.g.fc(a, b, c) != 0) rhs = rhs + m.g.fc(a, b, c) * m.J[static_cast<size_t>(c)];
      check(lhs == rhs, "g commutators on J");
    }
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      check(rat_commutator(m.Lambda, m.Tm(mu, nu)).is_zero(), "[Lambda, T] = 0");
  for (const auto& j : m.J) check(rat_commutator(m.Lambda, j).is_zero(), "[Lambda, J] = 0");
  if (m.has_U()) {
    for (int rho = 0; rho < n; ++rho)
      for (int f = 0; f < m.sp.svars(); ++f) {
        const RatMat& u = m.Um(rho, f);
        check(rat_commutator(m.Lambda, u) == Rat(-2) * u, "[Lambda, U] = -2U");
        for (const auto& j : m.J) check(rat_commutator(u, j).is_zero(), "[U, J] = 0");
        for (int rho2 = 0; rho2 < n; ++rho2)
          for (int f2 = 0; f2 < m.sp.svars(); ++f2)
            check(rat_commutator(u, m.Um(rho2, f2)).is_zero(), "[U, U] = 0");
      }
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        for (int rho = 0; rho < n; ++rho)
          for (int f = 0; f < m.sp.svars(); ++f) {
            auto [sg, ta] = m.sp.s_pair_axes(f);
            RatMat lhs = rat_commutator(m.Tm(mu, nu), m.Um(rho, f));
            RatMat rhs = RatMat::zero(m.wdim, m.wdim);
            if (rho == nu) rhs = rhs + u_pair(m, mu, sg, ta);
            rhs = rhs - ((mu == sg) ? u_pair(m, rho, nu, ta) : RatMat::zero(m.wdim, m.wdim));
            rhs = rhs - ((mu == ta) ? u_pair(m, rho, sg, nu) : RatMat::zero(m.wdim, m.wdim));
            check(lhs == rhs, "[T, U] tensor relation");
          }
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

SymmetryGenerator SymmetryGenerator::vect(std::vector<JetPoly> xi) {
  for (const auto& c : xi)
    if (!c.x_only()) throw std::invalid_argument("vector-field components must not depend on s");
  return {Kind::Vect, std::move(xi)};
}

SymmetryGenerator SymmetryGenerator::gauge(std::vector<JetPoly> X) {
  return {Kind::Gauge, std::move(X)};
}

SymmetryGenerator SymmetryGenerator::rescale(JetPoly F) {
  if (!F.x_only()) throw std::invalid_argument("rescaling must not depend on s");
  return {Kind::Rescale, {std::move(F)}};
}

JetPoly realize(const SymmetryGenerator& g, const ModuleRep& m, const JetPoly& phi) {
  const auto& sp = phi.sp;
  JetPoly out = JetPoly::zero(sp, phi.wdim);
  switch (g.kind) {
    case SymmetryGenerator::Kind::Vect: {
      for (int mu = 0; mu < sp.n; ++mu) {
        if (!g.comp[static_cast<size_t>(mu)].is_zero())
          out += mul(g.comp[static_cast<size_t>(mu)], dx(phi, mu));
        for (int nu = 0; nu < sp.n; ++nu) {
          JetPoly dxi = dx(g.comp[static_cast<size_t>(mu)], nu);
          if (dxi.is_zero()) continue;
          JetPoly t = stilde_derivative(phi, nu, mu);
          t += apply_mat(m.Tm(nu, mu), phi);
          out += mul(dxi, t);
        }
      }
      return out;
    }
    case SymmetryGenerator::Kind::Gauge: {
      for (int a = 0; a < m.g.dim; ++a)
        if (!g.comp[static_cast<size_t>(a)].is_zero())
          out += mul(g.comp[static_cast<size_t>(a)], apply_mat(m.J[static_cast<size_t>(a)], phi));
      return out;
    }
    case SymmetryGenerator::Kind::Rescale: {
      const JetPoly& F = g.comp[0];
      out += mul(F, s_euler(phi));
      out += mul(F, apply_mat(m.Lambda, phi));
      if (m.has_U()) {
        const Rat fac = sp.p == 2 ? 2 : 1;
        for (int rho = 0; rho < sp.n; ++rho) {
          JetPoly dF = dx(F, rho);
          if (dF.is_zero()) continue;
          JetPoly acc = JetPoly::zero(sp, phi.wdim);
          for (int f = 0; f < sp.svars(); ++f)
            acc += mul_rat(fac, mul_s_flat(apply_mat(m.Um(rho, f), phi), f));
          out += mul(dF, acc);
        }
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

JetPoly apply_generator(const SymmetryGenerator& g, const ModuleRep& m, const JetPoly& phi) {
  return -realize(g, m, phi);
}

namespace {

SymmetryGenerator negate(SymmetryGenerator g) {
  for (auto& c : g.comp) c = -c;
  return g;
}

}  // namespace

SymmetryGenerator bracket(const SymmetryGenerator& g1, const SymmetryGenerator& g2,
                          const JetSpace& sp, const liealg::RationalAlgebra& alg) {
  using K = SymmetryGenerator::Kind;
  if (g1.kind == K::Vect && g2.kind == K::Vect) {
    std::vector<JetPoly> comp;
    for (int nu = 0; nu < sp.n; ++nu) {
      JetPoly c = JetPoly::zero(sp, 1);
      for (int mu = 0; mu < sp.n; ++mu) {
        c += mul(g1.comp[static_cast<size_t>(mu)], dx(g2.comp[static_cast<size_t>(nu)], mu));
        c -= mul(g2.comp[static_cast<size_t>(mu)], dx(g1.comp[static_cast<size_t>(nu)], mu));
      }
      comp.push_back(std::move(c));
    }
    return SymmetryGenerator::vect(std::move(comp));
  }
  if (g1.kind == K::Vect && g2.kind == K::Gauge) {
    std::vector<JetPoly> comp;
    for (int a = 0; a < alg.dim; ++a) {
      JetPoly c = JetPoly::zero(sp, 1);
      const JetPoly& Xa = g2.comp[static_cast<size_t>(a)];
      for (int mu = 0; mu < sp.n; ++mu) {
        c += mul(g1.comp[static_cast<size_t>(mu)], dx(Xa, mu));
        for (int nu = 0; nu < sp.n; ++nu) {
          JetPoly dxi = dx(g1.comp[static_cast<size_t>(mu)], nu);
          if (!dxi.is_zero()) c += mul(dxi, stilde_derivative(Xa, nu, mu));
        }
      }
      comp.push_back(std::move(c));
    }
    return SymmetryGenerator::gauge(std::move(comp));
  }
  if (g1.kind == K::Gauge && g2.kind == K::Gauge) {
    std::vector<JetPoly> comp;
    for (int c = 0; c < alg.dim; ++c) {
      JetPoly out = JetPoly::zero(sp, 1);
      for (int a = 0; a < alg.dim; ++a)
        for (int b = 0; b < alg.dim; ++b)
          if (alg.fc(a, b, c) != 0)
            out += mul_rat(alg.fc(a, b, c),
                           mul(g1.comp[static_cast<size_t>(a)], g2.comp[static_cast<size_t>(b)]));
      comp.push_back(std::move(out));
    }
    return SymmetryGenerator::gauge(std::move(comp));
  }
  if (g1.kind == K::Vect && g2.kind == K::Rescale) {
    JetPoly c = JetPoly::zero(sp, 1);
    for (int mu = 0; mu < sp.n; ++mu)
      c += mul(g1.comp[static_cast<size_t>(mu)], dx(g2.comp[0], mu));
    return SymmetryGenerator::rescale(std::move(c));
  }
  if (g1.kind == K::Rescale && g2.kind == K::Rescale)
    return SymmetryGenerator::rescale(JetPoly::zero(sp, 1));
  if (g1.kind == K::Rescale && g2.kind == K::Gauge) {
    const Rat fac = sp.p == 2 ? 2 : 1;
    std::vector<JetPoly> comp;
    for (int a = 0; a < alg.dim; ++a) {
      JetPoly c = JetPoly::zero(sp, 1);
      for (int f = 0; f < sp.svars(); ++f)
        c += mul_rat(fac, mul_s_flat(ds_flat(g2.comp[static_cast<size_t>(a)], f), f));
      comp.push_back(mul(g1.comp[0], c));
    }
    return SymmetryGenerator::gauge(std::move(comp));
  }
  // remaining mixed orders by antisymmetry
  return negate(bracket(g2, g1, sp, alg));
}

JetPoly homomorphism_residual(const SymmetryGenerator& g1, const SymmetryGenerator& g2,
                              const ModuleRep& m, const JetPoly& phi) {
  JetPoly lhs = realize(g1, m, realize(g2, m, phi)) - realize(g2, m, realize(g1, m, phi));
  SymmetryGenerator br = bracket(g1, g2, phi.sp, m.g);
  return lhs - realize(br, m, phi);
}

GlnCheck gl_n_residual(const ModuleRep& m, int probe_degree) {
  GlnCheck out;
  const auto& sp = m.sp;
  // monomial probes up to probe_degree
  std::vector<Mono> probes;
  std::function<void(Mono, int, int)> rec = [&](Mono cur, int var, int deg) {
    if (var == sp.nvars()) {
      probes.push_back(cur);
      return;
    }
    for (int e = 0; e + deg <= probe_degree; ++e) {
      cur.e[static_cast<size_t>(var)] = static_cast<uint8_t>(e);
      rec(cur, var + 1, deg + e);
    }
  };
  Mono base;
  base.nv = static_cast<int8_t>(sp.nvars());
  rec(base, 0, 0);

  auto ttilde = [&](const JetPoly& f, int up, int lo) {
    JetPoly t = stilde_derivative(f, up, lo);
    t += apply_mat(m.Tm(up, lo), f);
    return t;
  };
  for (int mu = 0; mu < sp.n && out.max_deviation == 0; ++mu)
    for (int nu = 0; nu < sp.n && out.max_deviation == 0; ++nu)
      for (int rho = 0; rho < sp.n && out.max_deviation == 0; ++rho)
        for (int sg = 0; sg < sp.n && out.max_deviation == 0; ++sg)
          for (const auto& mono : probes) {
            for (int w = 0; w < m.wdim; ++w) {
              JetPoly phi = JetPoly::basis_section(sp, m.wdim, mono, w);
              JetPoly lhs = ttilde(ttilde(phi, rho, sg), mu, nu) - ttilde(ttilde(phi, mu, nu), rho, sg);
              if (rho == nu) lhs -= ttilde(phi, mu, sg);
              if (mu == sg) lhs += ttilde(phi, rho, nu);
              if (!lhs.is_zero()) {
                Rat dev = lhs.max_abs_coeff();
                if (dev > out.max_deviation) {
                  out.max_deviation = dev;
                  std::ostringstream os;
                  os << "[T~(" << mu << "," << nu << "),T~(" << rho << "," << sg
                     << ")] on monomial " << JetPoly::monomial(sp, mono, 1).str();
                  out.witness = os.str();
                }
              }
            }
            if (out.max_deviation != 0) break;
          }
  return out;
}

GerbeConnection GerbeConnection::zero(const JetSpace& sp, int gdim) {
  GerbeConnection c;
  c.sp = sp;
  c.gdim = gdim;
  c.A.assign(static_cast<size_t>(gdim) * sp.n, JetPoly::zero(sp, 1));
  c.Gamma.assign(static_cast<size_t>(sp.n) * sp.n * sp.n, JetPoly::zero(sp, 1));
  c.B.assign(static_cast<size_t>(gdim) * sp.svars(), JetPoly::zero(sp, 1));
  return c;
}

JetPoly GerbeConnection::b_pair(int ga, int sigma, int tau) const {
  if (sp.p != 2) throw std::invalid_argument("b_pair needs p = 2");
  if (sigma == tau) return JetPoly::zero(sp, 1);
  JetPoly v = b(ga, sp.s_pair_index(sigma, tau));
  return sigma < tau ? v : -v;
}

JetPoly cov_deriv_x(const GerbeConnection& c, const ModuleRep& m, const JetPoly& phi, int nu) {
  JetPoly out = dx(phi, nu);
  for (int sg = 0; sg < c.sp.n; ++sg)
    for (int ta = 0; ta < c.sp.n; ++ta) {
      const JetPoly& gam = c.gamma(sg, ta, nu);
      if (gam.is_zero()) continue;
      JetPoly t = stilde_derivative(phi, ta, sg);
      t += apply_mat(m.Tm(ta, sg), phi);
      out += mul(gam, t);
    }
  for (int a = 0; a < c.gdim; ++a)
    if (!c.a(a, nu).is_zero())
      out += mul(c.a(a, nu), apply_mat(m.J[static_cast<size_t>(a)], phi));
  return out;
}

JetPoly cov_deriv_s(const GerbeConnection& c, const ModuleRep& m, const JetPoly& phi, int flat) {
  JetPoly out = ds_flat(phi, flat);
  for (int a = 0; a < c.gdim; ++a)
    if (!c.b(a, flat).is_zero())
      out += mul(c.b(a, flat), apply_mat(m.J[static_cast<size_t>(a)], phi));
  return out;
}

GerbeConnection transform_connection(const SymmetryGenerator& g, const GerbeConnection& c,
                                     const liealg::RationalAlgebra& alg) {
  using K = SymmetryGenerator::Kind;
  const auto& sp = c.sp;
  GerbeConnection d = GerbeConnection::zero(sp, c.gdim);
  if (g.kind == K::Gauge) {
    for (int a = 0; a < c.gdim; ++a) {
      for (int nu = 0; nu < sp.n; ++nu) {
        JetPoly v = dx(g.comp[static_cast<size_t>(a)], nu);
        for (int b = 0; b < alg.dim; ++b)
          for (int cc = 0; cc < alg.dim; ++cc)
            if (alg.fc(b, cc, a) != 0)
              v -= mul_rat(alg.fc(b, cc, a), mul(g.comp[static_cast<size_t>(b)], c.a(cc, nu)));
        d.a(a, nu) = std::move(v);
      }
      for (int f = 0; f < sp.svars(); ++f) {
        JetPoly v = ds_flat(g.comp[static_cast<size_t>(a)], f);
        for (int b = 0; b < alg.dim; ++b)
          for (int cc = 0; cc < alg.dim; ++cc)
            if (alg.fc(b, cc, a) != 0)
              v -= mul_rat(alg.fc(b, cc, a), mul(g.comp[static_cast<size_t>(b)], c.b(cc, f)));
        d.b(a, f) = std::move(v);
      }
    }
    return d;
  }
  if (g.kind == K::Vect) {
    const auto& xi = g.comp;
    auto lie_scalar = [&](const JetPoly& f) {
      JetPoly v = JetPoly::zero(sp, 1);
      for (int mu = 0; mu < sp.n; ++mu) {
        v -= mul(xi[static_cast<size_t>(mu)], dx(f, mu));
        for (int sg = 0; sg < sp.n; ++sg) {
          JetPoly dxi = dx(xi[static_cast<size_t>(mu)], sg);
          if (!dxi.is_zero()) v -= mul(dxi, stilde_derivative(f, sg, mu));
        }
      }
      return v;
    };
    for (int a = 0; a < c.gdim; ++a) {
      for (int nu = 0; nu < sp.n; ++nu) {
        JetPoly v = lie_scalar(c.a(a, nu));
        for (int mu = 0; mu < sp.n; ++mu)
          v -= mul(dx(xi[static_cast<size_t>(mu)], nu), c.a(a, mu));
        d.a(a, nu) = std::move(v);
      }
      if (sp.p == 2) {
        for (int f = 0; f < sp.svars(); ++f) {
          auto [sg, ta] = sp.s_pair_axes(f);
          JetPoly v = lie_scalar(c.b(a, f));
          for (int mu = 0; mu < sp.n; ++mu) {
            v -= mul(dx(xi[static_cast<size_t>(mu)], sg), c.b_pair(a, mu, ta));
            v -= mul(dx(xi[static_cast<size_t>(mu)], ta), c.b_pair(a, sg, mu));
          }
          d.b(a, f) = std::move(v);
        }
      } else {
        for (int f = 0; f < sp.svars(); ++f) {
          JetPoly v = lie_scalar(c.b(a, f));
          for (int mu = 0; mu < sp.n; ++mu)
            v -= mul(dx(xi[static_cast<size_t>(mu)], f), c.b(a, mu));
          d.b(a, f) = std::move(v);
        }
      }
    }
    for (int sg = 0; sg < sp.n; ++sg)
      for (int ta = 0; ta < sp.n; ++ta)
        for (int nu = 0; nu < sp.n; ++nu) {
          JetPoly v = lie_scalar(c.gamma(sg, ta, nu));
          for (int kp = 0; kp < sp.n; ++kp) {
            v += mul(dx(xi[static_cast<size_t>(sg)], kp), c.gamma(kp, ta, nu));
            v -= mul(dx(xi[static_cast<size_t>(kp)], ta), c.gamma(sg, kp, nu));
            v -= mul(dx(xi[static_cast<size_t>(kp)], nu), c.gamma(sg, ta, kp));
          }
          v += dx(dx(xi[static_cast<size_t>(sg)], ta), nu);
          d.gamma(sg, ta, nu) = std::move(v);
        }
    return d;
  }
  throw std::invalid_argument("transform_connection: no transport law for rescalings");
}

std::vector<JetPoly> covariance_residuals(const SymmetryGenerator& g, const GerbeConnection& c,
                                          const ModuleRep& m, const JetPoly& phi) {
  const auto& sp = c.sp;
  JetPoly dphi = apply_generator(g, m, phi);
  GerbeConnection dc = transform_connection(g, c, m.g);
  std::vector<JetPoly> psi;
  for (int nu = 0; nu < sp.n; ++nu) psi.push_back(cov_deriv_x(c, m, phi, nu));

  std::vector<JetPoly> res;
  for (int nu = 0; nu < sp.n; ++nu) {
    JetPoly lhs = cov_deriv_x(c, m, dphi, nu);
    for (int sg = 0; sg < sp.n; ++sg)
      for (int ta = 0; ta < sp.n; ++ta) {
        const JetPoly& dg = dc.gamma(sg, ta, nu);
        if (dg.is_zero()) continue;
        JetPoly t = stilde_derivative(phi, ta, sg);
        t += apply_mat(m.Tm(ta, sg), phi);
        lhs += mul(dg, t);
      }
    for (int a = 0; a < c.gdim; ++a)
      if (!dc.a(a, nu).is_zero())
        lhs += mul(dc.a(a, nu), apply_mat(m.J[static_cast<size_t>(a)], phi));

    JetPoly rhs = apply_generator(g, m, psi[static_cast<size_t>(nu)]);
    if (g.kind == SymmetryGenerator::Kind::Vect)
      for (int mu = 0; mu < sp.n; ++mu)
        rhs -= mul(dx(g.comp[static_cast<size_t>(mu)], nu), psi[static_cast<size_t>(mu)]);
    res.push_back(lhs - rhs);
  }
  return res;
}

std::vector<JetPoly> covariance_residuals_s(const SymmetryGenerator& g, const GerbeConnection& c,
                                            const ModuleRep& m, const JetPoly& phi) {
  const auto& sp = c.sp;
  JetPoly dphi = apply_generator(g, m, phi);
  GerbeConnection dc = transform_connection(g, c, m.g);
  std::vector<JetPoly> psi;
  for (int f = 0; f < sp.svars(); ++f) psi.push_back(cov_deriv_s(c, m, phi, f));
  auto psi_pair = [&](int sg, int ta) {
    if (sg == ta) return JetPoly::zero(sp, phi.wdim);
    JetPoly v = psi[static_cast<size_t>(sp.s_pair_index(sg, ta))];
    return sg < ta ? v : -v;
  };

  std::vector<JetPoly> res;
  for (int f = 0; f < sp.svars(); ++f) {
    JetPoly lhs = cov_deriv_s(c, m, dphi, f);
    for (int a = 0; a < c.gdim; ++a)
      if (!dc.b(a, f).is_zero())
        lhs += mul(dc.b(a, f), apply_mat(m.J[static_cast<size_t>(a)], phi));
    JetPoly rhs = apply_generator(g, m, psi[static_cast<size_t>(f)]);
    if (g.kind == SymmetryGenerator::Kind::Vect) {
      if (sp.p == 2) {
        auto [sg, ta] = sp.s_pair_axes(f);
        for (int mu = 0; mu < sp.n; ++mu) {
          rhs -= mul(dx(g.comp[static_cast<size_t>(mu)], sg), psi_pair(mu, ta));
          rhs -= mul(dx(g.comp[static_cast<size_t>(mu)], ta), psi_pair(sg, mu));
        }
      } else {
        for (int mu = 0; mu < sp.n; ++mu)
          rhs -= mul(dx(g.comp[static_cast<size_t>(mu)], f), psi[static_cast<size_t>(mu)]);
      }
    }
    res.push_back(lhs - rhs);
  }
  return res;
}

CurvatureX curvature_x(const GerbeConnection& c, const ModuleRep& m, int mu, int nu) {
  const auto& sp = c.sp;
  CurvatureX out;
  out.R.assign(static_cast<size_t>(sp.n) * sp.n, JetPoly::zero(sp, 1));
  out.F.assign(static_cast<size_t>(c.gdim), JetPoly::zero(sp, 1));
  for (int sg = 0; sg < sp.n; ++sg)
    for (int ta = 0; ta < sp.n; ++ta) {
      JetPoly r = dx(c.gamma(sg, ta, nu), mu) - dx(c.gamma(sg, ta, mu), nu);
      for (int kp = 0; kp < sp.n; ++kp)
        for (int lm = 0; lm < sp.n; ++lm) {
          if (!c.gamma(kp, lm, mu).is_zero())
            r += mul(c.gamma(kp, lm, mu), stilde_derivative(c.gamma(sg, ta, nu), lm, kp));
          if (!c.gamma(kp, lm, nu).is_zero())
            r -= mul(c.gamma(kp, lm, nu), stilde_derivative(c.gamma(sg, ta, mu), lm, kp));
        }
      for (int kp = 0; kp < sp.n; ++kp) {
        r += mul(c.gamma(sg, kp, nu), c.gamma(kp, ta, mu));
        r -= mul(c.gamma(sg, kp, mu), c.gamma(kp, ta, nu));
      }
      out.R[static_cast<size_t>(sg) * sp.n + ta] = std::move(r);
    }
  for (int a = 0; a < c.gdim; ++a) {
    JetPoly f = dx(c.a(a, nu), mu) - dx(c.a(a, mu), nu);
    for (int kp = 0; kp < sp.n; ++kp)
      for (int lm = 0; lm < sp.n; ++lm) {
        if (!c.gamma(kp, lm, mu).is_zero())
          f += mul(c.gamma(kp, lm, mu), stilde_derivative(c.a(a, nu), lm, kp));
        if (!c.gamma(kp, lm, nu).is_zero())
          f -= mul(c.gamma(kp, lm, nu), stilde_derivative(c.a(a, mu), lm, kp));
      }
    for (int b = 0; b < c.gdim; ++b)
      for (int cc = 0; cc < c.gdim; ++cc)
        if (m.g.fc(b, cc, a) != 0)
          f += mul_rat(m.g.fc(b, cc, a), mul(c.a(b, mu), c.a(cc, nu)));
    out.F[static_cast<size_t>(a)] = std::move(f);
  }
  return out;
}

JetPoly curvature_x_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                   const JetPoly& phi, int mu, int nu) {
  JetPoly lhs = cov_deriv_x(c, m, cov_deriv_x(c, m, phi, nu), mu) -
                cov_deriv_x(c, m, cov_deriv_x(c, m, phi, mu), nu);
  CurvatureX cur = curvature_x(c, m, mu, nu);
  for (int sg = 0; sg < c.sp.n; ++sg)
    for (int ta = 0; ta < c.sp.n; ++ta) {
      const JetPoly& r = cur.R[static_cast<size_t>(sg) * c.sp.n + ta];
      if (r.is_zero()) continue;
      JetPoly t = stilde_derivative(phi, ta, sg);
      t += apply_mat(m.Tm(ta, sg), phi);
      lhs -= mul(r, t);
    }
  for (int a = 0; a < c.gdim; ++a)
    if (!cur.F[static_cast<size_t>(a)].is_zero())
      lhs -= mul(cur.F[static_cast<size_t>(a)], apply_mat(m.J[static_cast<size_t>(a)], phi));
  return lhs;
}

CurvatureS curvature_s(const GerbeConnection& c, const ModuleRep& m, int f1, int f2) {
  CurvatureS out;
  out.G.assign(static_cast<size_t>(c.gdim), JetPoly::zero(c.sp, 1));
  for (int a = 0; a < c.gdim; ++a) {
    JetPoly g = ds_flat(c.b(a, f2), f1) - ds_flat(c.b(a, f1), f2);
    for (int b = 0; b < c.gdim; ++b)
      for (int cc = 0; cc < c.gdim; ++cc)
        if (m.g.fc(b, cc, a) != 0)
          g += mul_rat(m.g.fc(b, cc, a), mul(c.b(b, f1), c.b(cc, f2)));
    out.G[static_cast<size_t>(a)] = std::move(g);
  }
  return out;
}

JetPoly curvature_s_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                   const JetPoly& phi, int f1, int f2) {
  JetPoly lhs = cov_deriv_s(c, m, cov_deriv_s(c, m, phi, f2), f1) -
                cov_deriv_s(c, m, cov_deriv_s(c, m, phi, f1), f2);
  CurvatureS cur = curvature_s(c, m, f1, f2);
  for (int a = 0; a < c.gdim; ++a)
    if (!cur.G[static_cast<size_t>(a)].is_zero())
      lhs -= mul(cur.G[static_cast<size_t>(a)], apply_mat(m.J[static_cast<size_t>(a)], phi));
  return lhs;
}

CrossCurvature cross_curvature(const GerbeConnection& c, const ModuleRep& m, int mu, int flat) {
  const auto& sp = c.sp;
  CrossCurvature out;
  out.J.assign(static_cast<size_t>(c.gdim), JetPoly::zero(sp, 1));
  out.Eth.assign(static_cast<size_t>(sp.svars()), JetPoly::zero(sp, 1));
  for (int a = 0; a < c.gdim; ++a) {
    JetPoly j = dx(c.b(a, flat), mu) - ds_flat(c.a(a, mu), flat);
    for (int kp = 0; kp < sp.n; ++kp)
      for (int lm = 0; lm < sp.n; ++lm)
        if (!c.gamma(kp, lm, mu).is_zero())
          j += mul(c.gamma(kp, lm, mu), stilde_derivative(c.b(a, flat), lm, kp));
    for (int b = 0; b < c.gdim; ++b)
      for (int cc = 0; cc < c.gdim; ++cc)
        if (m.g.fc(b, cc, a) != 0)
          j += mul_rat(m.g.fc(b, cc, a), mul(c.a(b, mu), c.b(cc, flat)));
    out.J[static_cast<size_t>(a)] = std::move(j);
  }
  if (sp.p == 2) {
    auto [sg, ta] = sp.s_pair_axes(flat);
    for (int kp = 0; kp < sp.n; ++kp) {
      // -Gamma^kp_{sg mu} eth_{kp ta} + Gamma^kp_{ta mu} eth_{kp sg}
      if (kp != ta) {
        int f2 = sp.s_pair_index(kp, ta);
        Rat sgn = kp < ta ? 1 : -1;
        out.Eth[static_cast<size_t>(f2)] -= mul_rat(sgn, c.gamma(kp, sg, mu));
      }
      if (kp != sg) {
        int f2 = sp.s_pair_index(kp, sg);
        Rat sgn = kp < sg ? 1 : -1;
        out.Eth[static_cast<size_t>(f2)] += mul_rat(sgn, c.gamma(kp, ta, mu));
      }
    }
  } else {
    for (int kp = 0; kp < sp.n; ++kp) out.Eth[static_cast<size_t>(kp)] -= c.gamma(kp, flat, mu);
  }
  return out;
}

JetPoly cross_curvature_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                       const JetPoly& phi, int mu, int flat) {
  JetPoly lhs = cov_deriv_x(c, m, cov_deriv_s(c, m, phi, flat), mu) -
                cov_deriv_s(c, m, cov_deriv_x(c, m, phi, mu), flat);
  CrossCurvature cur = cross_curvature(c, m, mu, flat);
  for (int a = 0; a < c.gdim; ++a)
    if (!cur.J[static_cast<size_t>(a)].is_zero())
      lhs -= mul(cur.J[static_cast<size_t>(a)], apply_mat(m.J[static_cast<size_t>(a)], phi));
  for (int f = 0; f < c.sp.svars(); ++f)
    if (!cur.Eth[static_cast<size_t>(f)].is_zero())
      lhs -= mul(cur.Eth[static_cast<size_t>(f)], ds_flat(phi, f));
  return lhs;
}

JetPoly scale_covariance_residual(const SymmetryGenerator& g, const GerbeConnection& c,
                                  const ModuleRep& m, const JetPoly& phi) {
  const auto& sp = c.sp;
  if (sp.p != 2) throw std::invalid_argument("scale_covariance_residual needs p = 2");
  JetPoly dphi = apply_generator(g, m, phi);
  GerbeConnection dc = transform_connection(g, c, m.g);

  JetPoly psi = JetPoly::zero(sp, phi.wdim);
  for (int f = 0; f < sp.svars(); ++f)
    psi += mul_rat(2, mul_s_flat(cov_deriv_s(c, m, phi, f), f));

  JetPoly lhs = JetPoly::zero(sp, phi.wdim);
  for (int f = 0; f < sp.svars(); ++f) {
    JetPoly piece = ds_flat(dphi, f);
    for (int a = 0; a < c.gdim; ++a) {
      if (!dc.b(a, f).is_zero())
        piece += mul(dc.b(a, f), apply_mat(m.J[static_cast<size_t>(a)], phi));
      if (!c.b(a, f).is_zero())
        piece += mul(c.b(a, f), apply_mat(m.J[static_cast<size_t>(a)], dphi));
    }
    lhs += mul_rat(2, mul_s_flat(piece, f));
  }
  return lhs - apply_generator(g, m, psi);
}

// ---------- randomised inputs ----------

JetPoly random_scalar(const JetSpace& sp, SplitMix& rng, int max_degree, bool x_only, int terms) {
  JetPoly out = JetPoly::zero(sp, 1);
  int vars = x_only ? sp.n : sp.nvars();
  for (int t = 0; t < terms; ++t) {
    Mono m;
    m.nv = static_cast<int8_t>(sp.nvars());
    int deg = static_cast<int>(rng.below(static_cast<uint64_t>(max_degree + 1)));
    for (int d = 0; d < deg; ++d) {
      int v = static_cast<int>(rng.below(static_cast<uint64_t>(vars)));
      ++m.e[static_cast<size_t>(v)];
    }
    long coef = static_cast<long>(rng.below(7)) - 3;
    if (coef == 0) coef = 1;
    out += JetPoly::monomial(sp, m, Rat(coef));
  }
  return out;
}

SymmetryGenerator random_generator(SymmetryGenerator::Kind kind, const JetSpace& sp,
                                   const liealg::RationalAlgebra& g, SplitMix& rng,
                                   int max_degree) {
  switch (kind) {
    case SymmetryGenerator::Kind::Vect: {
      std::vector<JetPoly> c;
      for (int mu = 0; mu < sp.n; ++mu) c.push_back(random_scalar(sp, rng, max_degree, true, 3));
      return SymmetryGenerator::vect(std::move(c));
    }
    case SymmetryGenerator::Kind::Gauge: {
      std::vector<JetPoly> c;
      for (int a = 0; a < g.dim; ++a) c.push_back(random_scalar(sp, rng, max_degree, false, 3));
      return SymmetryGenerator::gauge(std::move(c));
    }
    case SymmetryGenerator::Kind::Rescale:
      return SymmetryGenerator::rescale(random_scalar(sp, rng, max_degree, true, 3));
  }
  throw std::logic_error("unreachable");
}

GerbeConnection random_connection(const JetSpace& sp, const liealg::RationalAlgebra& g,
                                  SplitMix& rng, int max_degree) {
  GerbeConnection c = GerbeConnection::zero(sp, g.dim);
  for (auto& p : c.A) p = random_scalar(sp, rng, max_degree, false, 2);
  for (auto& p : c.Gamma) p = random_scalar(sp, rng, max_degree, false, 2);
  for (auto& p : c.B) p = random_scalar(sp, rng, max_degree, false, 2);
  return c;
}

JetPoly random_section(const JetSpace& sp, const ModuleRep& m, SplitMix& rng, int max_degree) {
  JetPoly out = JetPoly::zero(sp, m.wdim);
  for (int t = 0; t < 3; ++t) {
    Mono mono;
    mono.nv = static_cast<int8_t>(sp.nvars());
    int deg = static_cast<int>(rng.below(static_cast<uint64_t>(max_degree + 1)));
    for (int d = 0; d < deg; ++d)
      ++mono.e[static_cast<size_t>(rng.below(static_cast<uint64_t>(sp.nvars())))];
    int w = static_cast<int>(rng.below(static_cast<uint64_t>(m.wdim)));
    long coef = static_cast<long>(rng.below(7)) - 3;
    if (coef == 0) coef = 2;
    out += mul_rat(Rat(coef), JetPoly::basis_section(sp, m.wdim, mono, w));
  }
  return out;
}

}  // namespace pform::gerbejet
