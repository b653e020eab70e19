#include "pform/liealg.hpp"

#include <cmath>
#include <stdexcept>

namespace pform::liealg {

using multitensor::Cplx;
using multitensor::Mat;

namespace {

// Structure constants from an exact matrix rep by solving [J^a,J^b] = f^{ab}_c J^c
// entrywise; requires the J to be linearly independent with an integer-friendly span.
std::vector<Rat> structure_constants_from_rep(const std::vector<RatMat>& J) {
  const int dim = static_cast<int>(J.size());
  const int d = J[0].rows;
  const int n2 = d * d;
  // Solve least-structure linear systems by Gaussian elimination on the d^2 x dim matrix.
  RatMat basis(n2, dim);
  for (int a = 0; a < dim; ++a)
    for (int i = 0; i < n2; ++i) basis(i, a) = J[static_cast<size_t>(a)].a[static_cast<size_t>(i)];
  std::vector<Rat> f(static_cast<size_t>(dim) * dim * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      RatMat rhsm = rat_commutator(J[static_cast<size_t>(a)], J[static_cast<size_t>(b)]);
      // Solve basis * x = rhs.
      RatMat aug(n2, dim + 1);
      for (int i = 0; i < n2; ++i) {
        for (int c = 0; c < dim; ++c) aug(i, c) = basis(i, c);
        aug(i, dim) = rhsm.a[static_cast<size_t>(i)];
      }
      int row = 0;
      std::vector<int> pivot_col;
      for (int col = 0; col < dim && row < n2; ++col) {
        int piv = -1;
        for (int r = row; r < n2; ++r)
          if (aug(r, col) != 0) { piv = r; break; }
        if (piv < 0) continue;
        if (piv != row)
          for (int j = 0; j <= dim; ++j) std::swap(aug(piv, j), aug(row, j));
        Rat dval = aug(row, col);
        for (int j = 0; j <= dim; ++j) aug(row, j) /= dval;
        for (int r = 0; r < n2; ++r) {
          if (r == row || aug(r, col) == 0) continue;
          Rat fac = aug(r, col);
          for (int j = 0; j <= dim; ++j) aug(r, j) -= fac * aug(row, j);
        }
        pivot_col.push_back(col);
        ++row;
      }
      for (int r = row; r < n2; ++r)
        if (aug(r, dim) != 0) throw std::domain_error("commutator outside algebra span");
      for (size_t k = 0; k < pivot_col.size(); ++k)
        f[(static_cast<size_t>(a) * dim + b) * dim + pivot_col[k]] = aug(static_cast<int>(k), dim);
    }
  return f;
}

RatMat killing_form(int dim, const std::vector<Rat>& f) {
  RatMat k(dim, dim);
  auto fc = [&](int a, int b, int c) -> const Rat& {
    return f[(static_cast<size_t>(a) * dim + b) * dim + c];
  };
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Rat acc = 0;
      for (int c = 0; c < dim; ++c)
        for (int d2 = 0; d2 < dim; ++d2) acc += fc(a, c, d2) * fc(b, d2, c);
      k(a, b) = acc;
    }
  return k;
}

Mat to_complex(const RatMat& m, Cplx scale = Cplx(1, 0)) {
  Mat out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = scale * rat_double(m(i, j));
  return out;
}

std::vector<RatMat> sl2_matrices() {
  RatMat e(2, 2), f(2, 2), h(2, 2);
  e(0, 1) = 1;
  f(1, 0) = 1;
  h(0, 0) = 1;
  h(1, 1) = -1;
  return {e, f, h};
}

std::vector<RatMat> gl_matrices(int n) {
  std::vector<RatMat> J;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RatMat m(n, n);
      m(i, j) = 1;
      J.push_back(m);
    }
  return J;
}

}  // namespace

std::pair<LieAlgebraSpec, MatrixRep> build_algebra(const std::string& name) {
  LieAlgebraSpec spec;
  MatrixRep rep;
  spec.name = name;
  if (name == "u1") {
    spec.dim = 1;
    spec.f.assign(1, Rat(0));
    spec.killing = RatMat::identity(1);
    spec.basis_note = "abelian; substitute metric = 1 (true Killing form vanishes)";
    rep.d = 1;
    Mat j(1, 1);
    j(0, 0) = Cplx(0, 1);
    rep.J = {j};
  } else if (name == "sl2") {
    auto J = sl2_matrices();
    spec.dim = 3;
    spec.f = structure_constants_from_rep(J);
    spec.killing = killing_form(spec.dim, spec.f);
    spec.basis_note = "Chevalley basis (e,f,h): [h,e]=2e, [h,f]=-2f, [e,f]=h; true Killing form";
    rep.d = 2;
    for (const auto& m : J) rep.J.push_back(to_complex(m));
    rep.J_exact = J;
  } else if (name == "su2") {
    spec.dim = 3;
    spec.f.assign(27, Rat(0));
    // f^{ab}_c = -eps_{abc}
    auto set_eps = [&](int a, int b, int c, int sign) { spec.fc(a, b, c) = -sign; };
    set_eps(0, 1, 2, 1);
    set_eps(1, 2, 0, 1);
    set_eps(2, 0, 1, 1);
    set_eps(1, 0, 2, -1);
    set_eps(2, 1, 0, -1);
    set_eps(0, 2, 1, -1);
    spec.killing = killing_form(spec.dim, spec.f);  // -2 delta_{ab}
    spec.basis_note = "anti-Hermitian basis J^a = (i/2) sigma_a; f^{ab}_c = -eps_{abc}";
    rep.d = 2;
    Mat s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, Cplx(0, -1), Cplx(0, 1), 0;
    s3 << 1, 0, 0, -1;
    for (const Mat& s : {s1, s2, s3}) rep.J.push_back(Cplx(0, 0.5) * s);
  } else if (name.rfind("gl", 0) == 0 && name.size() == 3 && name[2] >= '1' && name[2] <= '4') {
    int n = name[2] - '0';
    auto J = gl_matrices(n);
    spec.dim = n * n;
    spec.f = structure_constants_from_rep(J);
    // Trace form tr(E^{ij} E^{kl}) = delta_{jk} delta_{il}: invertible substitute metric.
    spec.killing = RatMat(spec.dim, spec.dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) spec.killing(i * n + j, j * n + i) = 1;
    spec.basis_note = "elementary-matrix basis E^{ij}; substitute metric = trace form";
    rep.d = n;
    for (const auto& m : J) rep.J.push_back(to_complex(m));
    rep.J_exact = J;
  } else {
    throw std::invalid_argument("unknown algebra: " + name);
  }
  rep.algebra = spec;
  return {spec, rep};
}

Rat jacobi_residual(const LieAlgebraSpec& spec) {
  Rat worst = 0;
  const int n = spec.dim;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          Rat acc = 0;
          for (int d = 0; d < n; ++d)
            acc += spec.fc(a, b, d) * spec.fc(d, c, e) + spec.fc(b, c, d) * spec.fc(d, a, e) +
                   spec.fc(c, a, d) * spec.fc(d, b, e);
          if (rat_abs(acc) > worst) worst = rat_abs(acc);
        }
  return worst;
}

double rep_commutator_residual(const MatrixRep& rep) {
  double worst = 0;
  const int n = rep.algebra.dim;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mat lhs = rep.J[a] * rep.J[b] - rep.J[b] * rep.J[a];
      for (int c = 0; c < n; ++c) lhs -= rat_double(rep.algebra.fc(a, b, c)) * rep.J[c];
      worst = std::max(worst, lhs.cwiseAbs().maxCoeff());
    }
  return worst;
}

multitensor::SitedOperator casimir_tensor(const MatrixRep& rep) {
  RatMat kinv = rat_inverse(rep.algebra.killing);  // throws on a singular metric
  const int n = rep.algebra.dim, d = rep.d;
  Mat t = Mat::Zero(d * d, d * d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double w = rat_double(kinv(a, b));
      if (w == 0) continue;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l)
              t(i * d + j, k * d + l) += w * rep.J[a](i, k) * rep.J[b](j, l);
    }
  return multitensor::SitedOperator::on_slots({d, d}, {1, 2}, std::move(t));
}

double casimir_invariance_residual(const MatrixRep& rep) {
  auto t = casimir_tensor(rep);
  double worst = 0;
  const int d = rep.d;
  for (int a = 0; a < rep.algebra.dim; ++a) {
    auto ja1 = multitensor::SitedOperator::on_slots({d, d}, {1}, rep.J[a]);
    auto ja2 = multitensor::SitedOperator::on_slots({d, d}, {2}, rep.J[a]);
    auto co = multitensor::add(ja1, ja2);
    worst = std::max(worst, multitensor::frobenius_norm(multitensor::commutator(t, co)));
  }
  return worst;
}

nlohmann::json to_json(const LieAlgebraSpec& spec) {
  nlohmann::json f = nlohmann::json::array();
  for (int a = 0; a < spec.dim; ++a) {
    nlohmann::json fa = nlohmann::json::array();
    for (int b = 0; b < spec.dim; ++b) {
      nlohmann::json fb = nlohmann::json::array();
      for (int c = 0; c < spec.dim; ++c) fb.push_back(rat_str(spec.fc(a, b, c)));
      fa.push_back(fb);
    }
    f.push_back(fa);
  }
  nlohmann::json k = nlohmann::json::array();
  for (int i = 0; i < spec.dim; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < spec.dim; ++j) row.push_back(rat_str(spec.killing(i, j)));
    k.push_back(row);
  }
  return {{"name", spec.name}, {"dim", spec.dim}, {"f", f}, {"killing", k},
          {"basis", spec.basis_note}};
}

LieAlgebraSpec algebra_from_json(const nlohmann::json& j) {
  LieAlgebraSpec spec;
  spec.name = j.value("name", "");
  spec.dim = j.at("dim").get<int>();
  spec.basis_note = j.value("basis", "");
  spec.f.assign(static_cast<size_t>(spec.dim) * spec.dim * spec.dim, Rat(0));
  const auto& f = j.at("f");
  for (int a = 0; a < spec.dim; ++a)
    for (int b = 0; b < spec.dim; ++b)
      for (int c = 0; c < spec.dim; ++c)
        spec.fc(a, b, c) = rat_parse(f.at(a).at(b).at(c).get<std::string>());
  spec.killing = RatMat(spec.dim, spec.dim);
  const auto& k = j.at("killing");
  for (int i = 0; i < spec.dim; ++i)
    for (int jj = 0; jj < spec.dim; ++jj)
      spec.killing(i, jj) = rat_parse(k.at(i).at(jj).get<std::string>());
  return spec;
}

RationalAlgebra rational_algebra(const std::string& name) {
  RationalAlgebra g;
  g.name = name;
  if (name == "u1") {
    g.dim = 1;
    g.d = 1;
    g.f.assign(1, Rat(0));
    g.killing = RatMat::identity(1);
    RatMat j(1, 1);
    j(0, 0) = 1;
    g.J = {j};
  } else if (name == "sl2") {
    auto J = sl2_matrices();
    g.dim = 3;
    g.d = 2;
    g.f = structure_constants_from_rep(J);
    g.killing = killing_form(g.dim, g.f);
    g.J = J;
  } else {
    throw std::invalid_argument("no exact rational rep shipped for: " + name);
  }
  return g;
}

}  // namespace pform::liealg
