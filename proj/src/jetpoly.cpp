#include "pform/jetpoly.hpp"

#include <algorithm>
#include <sstream>

namespace pform::gerbejet {

namespace {

bool all_zero(const std::vector<Rat>& v) {
  for (const auto& r : v)
    if (r != 0) return false;
  return true;
}

}  // namespace

JetPoly JetPoly::constant(const JetSpace& sp, const Rat& c) {
  JetPoly f = zero(sp, 1);
  if (c != 0) {
    Mono m;
    m.nv = static_cast<int8_t>(sp.nvars());
    f.terms[m] = {c};
  }
  return f;
}

JetPoly JetPoly::monomial(const JetSpace& sp, const Mono& m, const Rat& c) {
  JetPoly f = zero(sp, 1);
  if (c != 0) f.terms[m] = {c};
  return f;
}

JetPoly JetPoly::x_var(const JetSpace& sp, int mu) {
  if (mu < 0 || mu >= sp.n) throw std::invalid_argument("x index out of range");
  Mono m;
  m.nv = static_cast<int8_t>(sp.nvars());
  m.e[static_cast<size_t>(mu)] = 1;
  return monomial(sp, m, 1);
}

JetPoly JetPoly::s_var_flat(const JetSpace& sp, int flat) {
  if (flat < 0 || flat >= sp.svars()) throw std::invalid_argument("s index out of range");
  Mono m;
  m.nv = static_cast<int8_t>(sp.nvars());
  m.e[static_cast<size_t>(sp.n + flat)] = 1;
  return monomial(sp, m, 1);
}

JetPoly JetPoly::basis_section(const JetSpace& sp, int wdim, const Mono& m, int w) {
  JetPoly f = zero(sp, wdim);
  std::vector<Rat> c(static_cast<size_t>(wdim));
  c[static_cast<size_t>(w)] = 1;
  f.terms[m] = std::move(c);
  return f;
}

int JetPoly::max_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, m.degree());
  return d;
}

Rat JetPoly::max_abs_coeff() const {
  Rat worst = 0;
  for (const auto& [m, c] : terms)
    for (const auto& r : c)
      if (rat_abs(r) > worst) worst = rat_abs(r);
  return worst;
}

bool JetPoly::x_only() const {
  for (const auto& [m, c] : terms)
    if (m.s_degree(sp.n) != 0) return false;
  return true;
}

void JetPoly::prune() {
  for (auto it = terms.begin(); it != terms.end();)
    it = all_zero(it->second) ? terms.erase(it) : std::next(it);
}

void JetPoly::check_cap(const char* what) const {
  for (const auto& [m, c] : terms)
    if (m.degree() > sp.degree_cap)
      throw JetOverflowError(std::string(what) + ": exact result exceeds degree cap " +
                             std::to_string(sp.degree_cap));
}

JetPoly& JetPoly::operator+=(const JetPoly& other) {
  if (!(sp == other.sp) || wdim != other.wdim)
    throw std::invalid_argument("jet polynomial shape mismatch");
  for (const auto& [m, c] : other.terms) {
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms[m] = c;
    } else {
      for (size_t i = 0; i < c.size(); ++i) it->second[i] += c[i];
    }
  }
  prune();
  return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& other) {
  if (!(sp == other.sp) || wdim != other.wdim)
    throw std::invalid_argument("jet polynomial shape mismatch");
  for (const auto& [m, c] : other.terms) {
    auto it = terms.find(m);
    if (it == terms.end()) {
      auto neg = c;
      for (auto& r : neg) r = -r;
      terms[m] = std::move(neg);
    } else {
      for (size_t i = 0; i < c.size(); ++i) it->second[i] -= c[i];
    }
  }
  prune();
  return *this;
}

JetPoly operator-(const JetPoly& a) {
  JetPoly out = a;
  for (auto& [m, c] : out.terms)
    for (auto& r : c) r = -r;
  return out;
}

std::string JetPoly::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "[";
    for (size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << rat_str(c[i]);
    os << "]";
    for (int v = 0; v < m.nv; ++v) {
      if (!m.e[static_cast<size_t>(v)]) continue;
      if (v < sp.n)
        os << " x" << v;
      else if (sp.p == 1)
        os << " s" << (v - sp.n);
      else {
        auto [a, b] = sp.s_pair_axes(v - sp.n);
        os << " s" << a << b;
      }
      if (m.e[static_cast<size_t>(v)] > 1) os << "^" << int(m.e[static_cast<size_t>(v)]);
    }
  }
  return os.str();
}

JetPoly mul(const JetPoly& scalar, const JetPoly& poly) {
  if (!scalar.is_scalar()) throw std::invalid_argument("mul: first factor must be scalar");
  if (!(scalar.sp == poly.sp)) throw std::invalid_argument("mul: space mismatch");
  JetPoly out = JetPoly::zero(poly.sp, poly.wdim);
  for (const auto& [ma, ca] : scalar.terms)
    for (const auto& [mb, cb] : poly.terms) {
      Mono m = mb;
      for (int i = 0; i < m.nv; ++i) {
        int v = ma.e[static_cast<size_t>(i)] + mb.e[static_cast<size_t>(i)];
        if (v > 255) throw JetOverflowError("mul: exponent overflow");
        m.e[static_cast<size_t>(i)] = static_cast<uint8_t>(v);
      }
      auto it = out.terms.find(m);
      if (it == out.terms.end()) it = out.terms.emplace(m, std::vector<Rat>(cb.size())).first;
      for (size_t i = 0; i < cb.size(); ++i) it->second[i] += ca[0] * cb[i];
    }
  out.prune();
  out.check_cap("mul");
  return out;
}

JetPoly mul_rat(const Rat& c, const JetPoly& poly) {
  if (c == 0) return JetPoly::zero(poly.sp, poly.wdim);
  JetPoly out = poly;
  for (auto& [m, cv] : out.terms)
    for (auto& r : cv) r *= c;
  return out;
}

namespace {

JetPoly derivative(const JetPoly& f, int var) {
  JetPoly out = JetPoly::zero(f.sp, f.wdim);
  for (const auto& [m, c] : f.terms) {
    uint8_t e = m.e[static_cast<size_t>(var)];
    if (!e) continue;
    Mono d = m;
    d.e[static_cast<size_t>(var)] = static_cast<uint8_t>(e - 1);
    auto it = out.terms.find(d);
    if (it == out.terms.end()) it = out.terms.emplace(d, std::vector<Rat>(c.size())).first;
    for (size_t i = 0; i < c.size(); ++i) it->second[i] += Rat(int(e)) * c[i];
  }
  out.prune();
  return out;
}

JetPoly var_multiply(const JetPoly& f, int var) {
  JetPoly out = JetPoly::zero(f.sp, f.wdim);
  for (const auto& [m, c] : f.terms) {
    Mono d = m;
    if (d.e[static_cast<size_t>(var)] == 255) throw JetOverflowError("exponent overflow");
    d.e[static_cast<size_t>(var)] = static_cast<uint8_t>(d.e[static_cast<size_t>(var)] + 1);
    out.terms[d] = c;
  }
  out.check_cap("variable multiply");
  return out;
}

}  // namespace

JetPoly dx(const JetPoly& f, int mu) {
  if (mu < 0 || mu >= f.sp.n) throw std::invalid_argument("dx index out of range");
  return derivative(f, mu);
}

JetPoly ds_flat(const JetPoly& f, int flat) {
  if (flat < 0 || flat >= f.sp.svars()) throw std::invalid_argument("ds index out of range");
  return derivative(f, f.sp.n + flat);
}

JetPoly ds_pair(const JetPoly& f, int mu, int nu) {
  if (f.sp.p != 2) throw std::invalid_argument("ds_pair needs p = 2");
  if (mu == nu) return JetPoly::zero(f.sp, f.wdim);
  JetPoly d = ds_flat(f, f.sp.s_pair_index(mu, nu));
  return mu < nu ? d : -d;
}

JetPoly mul_s_pair(const JetPoly& f, int mu, int nu) {
  if (f.sp.p != 2) throw std::invalid_argument("mul_s_pair needs p = 2");
  if (mu == nu) return JetPoly::zero(f.sp, f.wdim);
  JetPoly m = var_multiply(f, f.sp.n + f.sp.s_pair_index(mu, nu));
  return mu < nu ? m : -m;
}

JetPoly mul_x(const JetPoly& f, int mu) {
  if (mu < 0 || mu >= f.sp.n) throw std::invalid_argument("mul_x index out of range");
  return var_multiply(f, mu);
}

JetPoly mul_s_flat(const JetPoly& f, int flat) {
  if (flat < 0 || flat >= f.sp.svars()) throw std::invalid_argument("mul_s index out of range");
  return var_multiply(f, f.sp.n + flat);
}

JetPoly apply_mat(const RatMat& m, const JetPoly& f) {
  if (m.cols != f.wdim) throw std::invalid_argument("apply_mat: dimension mismatch");
  JetPoly out = JetPoly::zero(f.sp, m.rows);
  for (const auto& [mono, c] : f.terms) {
    std::vector<Rat> v(static_cast<size_t>(m.rows));
    bool nz = false;
    for (int i = 0; i < m.rows; ++i) {
      Rat acc = 0;
      for (int j = 0; j < m.cols; ++j)
        if (m(i, j) != 0 && c[static_cast<size_t>(j)] != 0) acc += m(i, j) * c[static_cast<size_t>(j)];
      if (acc != 0) nz = true;
      v[static_cast<size_t>(i)] = std::move(acc);
    }
    if (nz) out.terms[mono] = std::move(v);
  }
  return out;
}

JetPoly stilde_derivative(const JetPoly& f, int up, int lo) {
  const auto& sp = f.sp;
  if (up < 0 || up >= sp.n || lo < 0 || lo >= sp.n) throw std::invalid_argument("bad axes");
  if (sp.p == 1) {
    JetPoly out = ds_flat(f, lo);
    return mul_s_flat(out, up);
  }
  JetPoly out = JetPoly::zero(sp, f.wdim);
  for (int rho = 0; rho < sp.n; ++rho) {
    if (rho == up || rho == lo) continue;
    out += mul_s_pair(ds_pair(f, lo, rho), up, rho);
  }
  return out;
}

JetPoly s_euler(const JetPoly& f) {
  const auto& sp = f.sp;
  JetPoly out = JetPoly::zero(sp, f.wdim);
  if (sp.p == 1) {
    for (int mu = 0; mu < sp.n; ++mu) out += mul_s_flat(ds_flat(f, mu), mu);
    return out;
  }
  // sum over all ordered pairs = 2 * sum over flat variables
  for (int k = 0; k < sp.svars(); ++k) out += mul_rat(2, mul_s_flat(ds_flat(f, k), k));
  return out;
}

}  // namespace pform::gerbejet
