#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pform/rational.hpp"

namespace pform::gerbejet {

/** Raised whenever an exact result would exceed the degree cap. */
struct JetOverflowError : std::runtime_error {
  explicit JetOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Variable bookkeeping for polynomials in x^mu and the surface coordinates:
 * p = 2 stores s^{mu nu} for mu < nu (s^{nu mu} = -s^{mu nu} resolved at
 * access), p = 1 stores s^mu.  Axes are 0-based.
 */
struct JetSpace {
  int n = 0;
  int p = 2;
  int degree_cap = 8;

  int svars() const { return p == 1 ? n : n * (n - 1) / 2; }
  int nvars() const { return n + svars(); }

  /** Flat s-variable index of the ordered pair mu < nu (p = 2). */
  int s_pair_index(int mu, int nu) const {
    if (p != 2) throw std::invalid_argument("s_pair_index needs p = 2");
    if (mu > nu) std::swap(mu, nu);
    if (mu < 0 || nu >= n || mu == nu) throw std::invalid_argument("bad s pair");
    int idx = 0;
    for (int a = 0; a < mu; ++a) idx += n - 1 - a;
    return idx + (nu - mu - 1);
  }
  std::pair<int, int> s_pair_axes(int flat) const {
    for (int a = 0; a < n; ++a) {
      int block = n - 1 - a;
      if (flat < block) return {a, a + 1 + flat};
      flat -= block;
    }
    throw std::invalid_argument("s index out of range");
  }

  bool operator==(const JetSpace&) const = default;
};

inline constexpr int kMaxJetVars = 16;

/** Exponent vector over the x variables followed by the s variables. */
struct Mono {
  std::array<uint8_t, kMaxJetVars> e{};
  int8_t nv = 0;

  int degree() const {
    int d = 0;
    for (int i = 0; i < nv; ++i) d += e[static_cast<size_t>(i)];
    return d;
  }
  int s_degree(int n) const {
    int d = 0;
    for (int i = n; i < nv; ++i) d += e[static_cast<size_t>(i)];
    return d;
  }
  auto operator<=>(const Mono&) const = default;
};

/**
 * W-valued polynomial with exact rational coefficients; wdim = 1 for scalars.
 * Operations never truncate: exceeding the degree cap raises JetOverflowError.
 */
struct JetPoly {
  JetSpace sp;
  int wdim = 1;
  std::map<Mono, std::vector<Rat>> terms;

  static JetPoly zero(const JetSpace& sp, int wdim = 1) { return JetPoly{sp, wdim, {}}; }
  static JetPoly constant(const JetSpace& sp, const Rat& c);
  static JetPoly monomial(const JetSpace& sp, const Mono& m, const Rat& c);
  static JetPoly x_var(const JetSpace& sp, int mu);
  static JetPoly s_var_flat(const JetSpace& sp, int flat);
  static JetPoly basis_section(const JetSpace& sp, int wdim, const Mono& m, int w);

  bool is_zero() const { return terms.empty(); }
  bool is_scalar() const { return wdim == 1; }
  int max_degree() const;
  Rat max_abs_coeff() const;
  /** True when every monomial has zero s-exponents. */
  bool x_only() const;

  void prune();   // drop exact-zero coefficient vectors
  void check_cap(const char* what) const;

  JetPoly& operator+=(const JetPoly& other);
  JetPoly& operator-=(const JetPoly& other);
  friend JetPoly operator+(JetPoly a, const JetPoly& b) { a += b; return a; }
  friend JetPoly operator-(JetPoly a, const JetPoly& b) { a -= b; return a; }
  friend JetPoly operator-(const JetPoly& a);
  friend bool operator==(const JetPoly& a, const JetPoly& b) {
    return a.sp == b.sp && a.wdim == b.wdim && a.terms == b.terms;
  }

  std::string str() const;  // human-readable, for witnesses
};

/** Product of a scalar polynomial with a (possibly W-valued) polynomial. */
JetPoly mul(const JetPoly& scalar, const JetPoly& poly);
JetPoly mul_rat(const Rat& c, const JetPoly& poly);

/** d/dx^mu */
JetPoly dx(const JetPoly& f, int mu);
/** d/d(flat s variable); for p = 2 this is eth_{mu nu} with mu < nu. */
JetPoly ds_flat(const JetPoly& f, int flat);
/** eth_{mu nu} with arbitrary index order (p = 2); zero when mu == nu. */
JetPoly ds_pair(const JetPoly& f, int mu, int nu);
/** multiplication by s^{mu nu} with arbitrary index order (p = 2). */
JetPoly mul_s_pair(const JetPoly& f, int mu, int nu);
JetPoly mul_x(const JetPoly& f, int mu);
JetPoly mul_s_flat(const JetPoly& f, int flat);

/** W-matrix action on the coefficients. */
JetPoly apply_mat(const RatMat& m, const JetPoly& f);

/** (s d)^{up}_{lo} f = sum_rho s^{up rho} eth_{lo rho} f  (p=1: s^{up} eth_{lo} f). */
JetPoly stilde_derivative(const JetPoly& f, int up, int lo);

/** sum over all s indices of s^{..} eth_{..} f (the s-Euler operator). */
JetPoly s_euler(const JetPoly& f);

}  // namespace pform::gerbejet
