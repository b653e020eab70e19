#include <algorithm>
#include <stdexcept>

#include "pform/gerbejet.hpp"
#include "pform/simplex.hpp"

namespace pform::gerbejet {

using multitensor::SitedOperator;

// ---------- antisymmetric form components ----------

AntisymForm AntisymForm::zero(const JetSpace& sp, int gdim, int rank) {
  if (rank < 2 || rank > 4) throw std::invalid_argument("AntisymForm rank must be 2..4");
  AntisymForm f;
  f.sp = sp;
  f.gdim = gdim;
  f.rank = rank;
  f.comp.assign(static_cast<size_t>(gdim) * f.tuples(), JetPoly::zero(sp, 1));
  return f;
}

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(r);
}

int ascending_tuple_index(int n, std::vector<int> idx) {
  // rank over ascending tuples in lexicographic order
  int r = static_cast<int>(idx.size());
  int rank = 0, prev = -1;
  for (int i = 0; i < r; ++i) {
    for (int v = prev + 1; v < idx[static_cast<size_t>(i)]; ++v) rank += binom(n - 1 - v, r - 1 - i);
    prev = idx[static_cast<size_t>(i)];
  }
  return rank;
}

}  // namespace

int AntisymForm::tuples() const { return binom(sp.n, rank); }

int AntisymForm::tuple_index(std::vector<int> idx, int& sign) const {
  if (static_cast<int>(idx.size()) != rank) throw std::invalid_argument("bad tuple size");
  sign = 1;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) {
        sign = 0;
        return -1;
      }
      if (idx[i] > idx[j]) {
        std::swap(idx[i], idx[j]);
        sign = -sign;
      }
    }
  for (int v : idx)
    if (v < 0 || v >= sp.n) throw std::invalid_argument("tuple index out of range");
  return ascending_tuple_index(sp.n, idx);
}

JetPoly AntisymForm::component(int ga, std::vector<int> idx) const {
  int sign = 0;
  int t = tuple_index(std::move(idx), sign);
  if (sign == 0) return JetPoly::zero(sp, 1);
  JetPoly v = at(ga, t);
  return sign > 0 ? v : -v;
}

GerbeConnection special_gauge_lift(const AntisymForm& a3) {
  const auto& sp = a3.sp;
  if (a3.rank != sp.p + 1)
    throw std::invalid_argument("special_gauge_lift: form rank must be p + 1");
  for (const auto& c : a3.comp)
    if (!c.x_only()) throw std::invalid_argument("special_gauge_lift: components must be x-only");
  GerbeConnection conn = GerbeConnection::zero(sp, a3.gdim);
  for (int a = 0; a < a3.gdim; ++a)
    for (int nu = 0; nu < sp.n; ++nu) {
      JetPoly v = JetPoly::zero(sp, 1);
      if (sp.p == 2) {
        for (int f = 0; f < sp.svars(); ++f) {
          auto [rho, sg] = sp.s_pair_axes(f);
          JetPoly cmp = a3.component(a, {nu, rho, sg});
          if (!cmp.is_zero()) v += mul_rat(2, mul_s_flat(cmp, f));
        }
      } else {
        for (int sg = 0; sg < sp.n; ++sg) {
          JetPoly cmp = a3.component(a, {nu, sg});
          if (!cmp.is_zero()) v += mul_s_flat(cmp, sg);
        }
      }
      conn.a(a, nu) = std::move(v);
    }
  return conn;
}

namespace {

// s-contraction A_{c nu kappa tau} s^{kappa tau} (p=2) or A_{c nu sigma} s^sigma (p=1).
JetPoly s_contracted(const AntisymForm& a, int ga, int nu) {
  const auto& sp = a.sp;
  JetPoly v = JetPoly::zero(sp, 1);
  if (sp.p == 2) {
    for (int f = 0; f < sp.svars(); ++f) {
      auto [k, t] = sp.s_pair_axes(f);
      JetPoly cmp = a.component(ga, {nu, k, t});
      if (!cmp.is_zero()) v += mul_rat(2, mul_s_flat(cmp, f));
    }
  } else {
    for (int sg = 0; sg < sp.n; ++sg) {
      JetPoly cmp = a.component(ga, {nu, sg});
      if (!cmp.is_zero()) v += mul_s_flat(cmp, sg);
    }
  }
  return v;
}

// X_a(x,s) = X_{a mu nu}(x) s^{mu nu} for a rank-2 parameter (p = 2).
JetPoly s_contracted_rank2(const AntisymForm& x, int ga) {
  const auto& sp = x.sp;
  JetPoly v = JetPoly::zero(sp, 1);
  for (int f = 0; f < sp.svars(); ++f) {
    auto [m, n] = sp.s_pair_axes(f);
    JetPoly cmp = x.component(ga, {m, n});
    if (!cmp.is_zero()) v += mul_rat(2, mul_s_flat(cmp, f));
  }
  return v;
}

// bracket component [A_t, sA_sig]_a = f^{bc}_a A_{b t} (sA)_{c sig}
JetPoly bracket_component(const AntisymForm& a, const liealg::RationalAlgebra& alg, int ga,
                          const std::vector<int>& t, int sig) {
  JetPoly out = JetPoly::zero(a.sp, 1);
  for (int b = 0; b < alg.dim; ++b) {
    JetPoly ab = a.component(b, t);
    if (ab.is_zero()) continue;
    for (int c = 0; c < alg.dim; ++c) {
      if (alg.fc(b, c, ga) == 0) continue;
      JetPoly sc = s_contracted(a, c, sig);
      if (!sc.is_zero()) out += mul_rat(alg.fc(b, c, ga), mul(ab, sc));
    }
  }
  return out;
}

}  // namespace

int FormCurvature::alt_tuples() const { return binom(sp.n, rank + 1); }

JetPoly FormCurvature::alt_component(int ga, std::vector<int> idx) const {
  AntisymForm probe;  // reuse the tuple indexing
  probe.sp = sp;
  probe.gdim = 1;
  probe.rank = rank + 1;
  int sign = 0;
  int t = probe.tuple_index(std::move(idx), sign);
  if (sign == 0) return JetPoly::zero(sp, 1);
  JetPoly v = alt[static_cast<size_t>(ga) * alt_tuples() + t];
  return sign > 0 ? v : -v;
}

FormCurvature form_curvature(const AntisymForm& a, const liealg::RationalAlgebra& alg) {
  const auto& sp = a.sp;
  if (a.rank != sp.p + 1) throw std::invalid_argument("form_curvature: rank must be p + 1");
  FormCurvature out;
  out.sp = sp;
  out.gdim = a.gdim;
  out.rank = a.rank;

  // pair components F_{a mu nu (rho sigma)}: d_mu A_{nu rho sigma} - d_nu A_{mu rho sigma}
  // + f^{bc}_a A_{b mu rho sigma} (s-contracted A_{c nu}); contraction over the
  // last slot reproduces the (x,s)-curvature of the lifted connection exactly.
  out.pair.assign(static_cast<size_t>(a.gdim) * sp.n * sp.n * sp.svars(), JetPoly::zero(sp, 1));
  auto pair_at = [&](int ga, int mu, int nu, int f) -> JetPoly& {
    return out.pair[((static_cast<size_t>(ga) * sp.n + mu) * sp.n + nu) * sp.svars() + f];
  };
  for (int ga = 0; ga < a.gdim; ++ga)
    for (int mu = 0; mu < sp.n; ++mu)
      for (int nu = 0; nu < sp.n; ++nu)
        for (int f = 0; f < sp.svars(); ++f) {
          std::vector<int> tail;
          if (sp.p == 2) {
            auto [r, s] = sp.s_pair_axes(f);
            tail = {r, s};
          } else {
            tail = {f};
          }
          auto with = [&](int head) {
            std::vector<int> idx = {head};
            idx.insert(idx.end(), tail.begin(), tail.end());
            return idx;
          };
          JetPoly v = dx(a.component(ga, with(nu)), mu) - dx(a.component(ga, with(mu)), nu);
          for (int b = 0; b < alg.dim; ++b) {
            JetPoly ab = a.component(b, with(mu));
            if (ab.is_zero()) continue;
            for (int c = 0; c < alg.dim; ++c) {
              if (alg.fc(b, c, ga) == 0) continue;
              JetPoly sc = s_contracted(a, c, nu);
              if (!sc.is_zero()) v += mul_rat(alg.fc(b, c, ga), mul(ab, sc));
            }
          }
          pair_at(ga, mu, nu, f) = std::move(v);
        }

  // fully antisymmetrised components on ascending tuples (unnormalised
  // permutation-sum convention, i.e. d_[mu X_nu rho] = 2(cyclic sum))
  out.alt.assign(static_cast<size_t>(a.gdim) * out.alt_tuples(), JetPoly::zero(sp, 1));
  AntisymForm tuple_helper;
  tuple_helper.sp = sp;
  tuple_helper.gdim = 1;
  tuple_helper.rank = a.rank + 1;
  std::vector<int> idx(static_cast<size_t>(a.rank) + 1);
  std::function<void(int, int)> walk = [&](int pos, int start) {
    if (pos == a.rank + 1) {
      int sign = 0;
      int tup = tuple_helper.tuple_index(idx, sign);
      for (int ga = 0; ga < a.gdim; ++ga) {
        JetPoly v = JetPoly::zero(sp, 1);
        // alternating sum over which index carries the derivative / contraction
        for (int k = 0; k <= a.rank; ++k) {
          std::vector<int> rest;
          for (int j = 0; j <= a.rank; ++j)
            if (j != k) rest.push_back(idx[static_cast<size_t>(j)]);
          // move idx[k] to the last slot: sign (-1)^{rank - k}
          int sgn = ((a.rank - k) % 2 == 0) ? 1 : -1;
          JetPoly term = dx(a.component(ga, rest), idx[static_cast<size_t>(k)]);
          term += bracket_component(a, alg, ga, rest, idx[static_cast<size_t>(k)]);
          v += mul_rat(Rat(sgn), term);
        }
        // unnormalised Alt = rank! * alternating sum
        long fact = 1;
        for (int j = 2; j <= a.rank; ++j) fact *= j;
        out.alt[static_cast<size_t>(ga) * out.alt_tuples() + tup] = mul_rat(Rat(fact), v);
      }
      return;
    }
    for (int v = start; v < sp.n; ++v) {
      idx[static_cast<size_t>(pos)] = v;
      walk(pos + 1, v + 1);
    }
  };
  if (sp.n >= a.rank + 1) walk(0, 0);
  return out;
}

std::vector<JetPoly> special_gauge_consistency(const AntisymForm& a3, const ModuleRep& m) {
  const auto& sp = a3.sp;
  GerbeConnection conn = special_gauge_lift(a3);
  FormCurvature fc = form_curvature(a3, m.g);
  std::vector<JetPoly> res;
  const Rat fac = sp.p == 2 ? 2 : 1;
  for (int mu = 0; mu < sp.n; ++mu)
    for (int nu = mu + 1; nu < sp.n; ++nu) {
      CurvatureX cx = curvature_x(conn, m, mu, nu);
      for (int sg = 0; sg < sp.n; ++sg)
        for (int ta = 0; ta < sp.n; ++ta)
          res.push_back(cx.R[static_cast<size_t>(sg) * sp.n + ta]);  // Gamma = 0 => must vanish
      for (int ga = 0; ga < a3.gdim; ++ga) {
        JetPoly rhs = JetPoly::zero(sp, 1);
        for (int f = 0; f < sp.svars(); ++f) {
          const JetPoly& pc =
              fc.pair[((static_cast<size_t>(ga) * sp.n + mu) * sp.n + nu) * sp.svars() + f];
          if (!pc.is_zero()) rhs += mul_rat(fac, mul_s_flat(pc, f));
        }
        res.push_back(cx.F[static_cast<size_t>(ga)] - rhs);
      }
    }
  return res;
}

Rat subalgebra_closure_defect(const AntisymForm& x2, const AntisymForm& y2,
                              const liealg::RationalAlgebra& alg) {
  const auto& sp = x2.sp;
  if (x2.rank != 2 || y2.rank != 2)
    throw std::invalid_argument("subalgebra_closure_defect: rank-2 parameters required");
  if (sp.p != 2) throw std::invalid_argument("subalgebra_closure_defect: p = 2 required");
  Rat worst = 0;
  for (int c = 0; c < alg.dim; ++c) {
    JetPoly out = JetPoly::zero(sp, 1);
    for (int a = 0; a < alg.dim; ++a) {
      JetPoly xa = s_contracted_rank2(x2, a);
      if (xa.is_zero()) continue;
      for (int b = 0; b < alg.dim; ++b) {
        if (alg.fc(a, b, c) == 0) continue;
        JetPoly yb = s_contracted_rank2(y2, b);
        if (!yb.is_zero()) out += mul_rat(alg.fc(a, b, c), mul(xa, yb));
      }
    }
    Rat dev = out.max_abs_coeff();
    if (dev > worst) worst = dev;
  }
  return worst;
}

std::vector<JetPoly> ym_divergence_residual(const AntisymForm& a3) {
  const auto& sp = a3.sp;
  if (a3.gdim != 1) throw std::invalid_argument("ym_divergence_residual: abelian input required");
  if (sp.p != 2 || a3.rank != 3) throw std::invalid_argument("ym_divergence_residual: p=2 rank-3");
  FormCurvature fc = form_curvature(a3, liealg::rational_algebra("u1"));
  std::vector<JetPoly> res;
  for (int mu = 0; mu < sp.n; ++mu) {
    JetPoly v = JetPoly::zero(sp, 1);
    for (int nu = 0; nu < sp.n; ++nu)
      for (int f = 0; f < sp.svars(); ++f) {
        auto [r, s] = sp.s_pair_axes(f);
        JetPoly comp = fc.alt_component(0, {mu, nu, r, s});
        if (!comp.is_zero()) v += mul_rat(2, mul_s_flat(dx(comp, nu), f));
      }
    res.push_back(std::move(v));
  }
  return res;
}

// ---------- homogeneous flatness reductions ----------

namespace {

SitedOperator promoted_full(const SitedOperator& op) {
  std::vector<int> all(op.slot_dims.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i) + 1;
  return multitensor::promote(op, all);
}

double full_norm(const SitedOperator& op) {
  std::array<SitedOperator, 1> one = {op};
  return multitensor::frobenius_norm_of_sum(one);
}

}  // namespace

FlatnessReduction homogeneous_flatness_reduction_p1(const std::array<SitedOperator, 3>& a,
                                                    const std::array<double, 3>& sstar) {
  // a = (A12, A13, A23) on V (x) V (x) V
  auto A = [&](int mu, int nu) -> SitedOperator {
    if (mu == nu) throw std::invalid_argument("A_{mu mu} undefined");
    bool swapd = mu > nu;
    if (swapd) std::swap(mu, nu);
    const SitedOperator* op = nullptr;
    if (mu == 1 && nu == 2) op = &a[0];
    if (mu == 1 && nu == 3) op = &a[1];
    if (mu == 2 && nu == 3) op = &a[2];
    if (!op) throw std::invalid_argument("A indices must be in 1..3");
    return swapd ? multitensor::scale(-1.0, *op) : *op;
  };
  auto sA = [&](int rho) {
    SitedOperator acc = multitensor::scale(0.0, a[0]);
    for (int s = 1; s <= 3; ++s) {
      if (s == rho) continue;
      acc = multitensor::add(acc, multitensor::scale(sstar[static_cast<size_t>(s - 1)], A(rho, s)));
    }
    return acc;
  };
  FlatnessReduction out;
  out.combination = multitensor::add(
      multitensor::add(multitensor::commutator(A(1, 2), sA(3)), multitensor::commutator(A(2, 3), sA(1))),
      multitensor::commutator(A(3, 1), sA(2)));
  out.simplex_combination = multitensor::scale(
      -2.0, multitensor::add(multitensor::add(multitensor::commutator(a[0], a[1]),
                                              multitensor::commutator(a[0], a[2])),
                             multitensor::commutator(a[1], a[2])));
  out.residual_abs = full_norm(out.combination);
  out.cross_check = full_norm(multitensor::sub(out.combination, out.simplex_combination));
  return out;
}

FlatnessReduction homogeneous_flatness_reduction_p2(
    const std::map<std::array<int, 3>, SitedOperator>& a,
    const std::map<std::pair<int, int>, double>& sstar) {
  auto sval = [&](int k, int t) {
    if (k > t) std::swap(k, t);
    auto it = sstar.find({k, t});
    return it == sstar.end() ? 1.0 : it->second;
  };
  auto A = [&](int mu, int nu, int rho) {
    std::array<int, 3> idx = {mu, nu, rho};
    int sign = 1;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        if (idx[static_cast<size_t>(i)] == idx[static_cast<size_t>(j)]) sign = 0;
        if (idx[static_cast<size_t>(i)] > idx[static_cast<size_t>(j)]) {
          std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
          sign = -sign;
        }
      }
    if (sign == 0) throw std::invalid_argument("repeated index in A");
    auto it = a.find(idx);
    if (it == a.end()) throw std::invalid_argument("missing triple operator");
    return sign > 0 ? it->second : multitensor::scale(-1.0, it->second);
  };
  auto sA = [&](int sg) {
    SitedOperator acc = multitensor::scale(0.0, a.begin()->second);
    for (int k = 1; k <= 4; ++k)
      for (int t = k + 1; t <= 4; ++t) {
        if (k == sg || t == sg) continue;
        acc = multitensor::add(acc, multitensor::scale(2.0 * sval(k, t), A(sg, k, t)));
      }
    return acc;
  };
  FlatnessReduction out;
  SitedOperator comb = multitensor::commutator(A(1, 2, 3), sA(4));
  comb = multitensor::sub(comb, multitensor::commutator(A(1, 2, 4), sA(3)));
  comb = multitensor::add(comb, multitensor::commutator(A(1, 3, 4), sA(2)));
  comb = multitensor::sub(comb, multitensor::commutator(A(2, 3, 4), sA(1)));
  out.combination = multitensor::scale(0.25, comb);

  const std::array<std::array<int, 3>, 4> triples = {
      std::array<int, 3>{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
  SitedOperator expect = multitensor::scale(0.0, a.begin()->second);
  for (size_t i = 0; i < triples.size(); ++i)
    for (size_t j = i + 1; j < triples.size(); ++j)
      expect = multitensor::add(expect, multitensor::commutator(a.at(triples[i]), a.at(triples[j])));
  out.simplex_combination = expect;
  out.residual_abs = full_norm(out.combination);
  out.cross_check = full_norm(multitensor::sub(out.combination, out.simplex_combination));
  return out;
}

}  // namespace pform::gerbejet
