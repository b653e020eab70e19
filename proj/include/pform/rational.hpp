#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pform {

using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

/** Parses "p/q" or "p"; throws on malformed input or q == 0. */
inline Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos)
      return Rat(boost::multiprecision::cpp_int(s));
    boost::multiprecision::cpp_int p(s.substr(0, slash));
    boost::multiprecision::cpp_int q(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator");
    return Rat(p, q);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: " + s);
  }
}

inline double rat_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/** Small dense rational matrix, row-major. */
struct RatMat {
  int rows = 0, cols = 0;
  std::vector<Rat> a;

  RatMat() = default;
  RatMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  static RatMat identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static RatMat zero(int r, int c) { return RatMat(r, c); }

  Rat& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Rat& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool is_zero() const {
    for (const auto& v : a)
      if (v != 0) return false;
    return true;
  }

  friend RatMat operator+(const RatMat& x, const RatMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("RatMat shape mismatch");
    RatMat m(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) m.a[i] = x.a[i] + y.a[i];
    return m;
  }
  friend RatMat operator-(const RatMat& x, const RatMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("RatMat shape mismatch");
    RatMat m(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) m.a[i] = x.a[i] - y.a[i];
    return m;
  }
  friend RatMat operator*(const RatMat& x, const RatMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("RatMat shape mismatch");
    RatMat m(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        const Rat& xv = x(i, k);
        if (xv == 0) continue;
        for (int j = 0; j < y.cols; ++j)
          if (y(k, j) != 0) m(i, j) += xv * y(k, j);
      }
    return m;
  }
  friend RatMat operator*(const Rat& c, const RatMat& y) {
    RatMat m(y.rows, y.cols);
    for (size_t i = 0; i < y.a.size(); ++i) m.a[i] = c * y.a[i];
    return m;
  }
  friend bool operator==(const RatMat& x, const RatMat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

inline RatMat rat_commutator(const RatMat& x, const RatMat& y) { return x * y - y * x; }

/** Gauss-Jordan inverse; throws on a singular matrix. */
inline RatMat rat_inverse(const RatMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("RatMat inverse: not square");
  const int n = m.rows;
  RatMat a = m, inv = RatMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) { piv = r; break; }
    if (piv < 0) throw std::domain_error("singular rational matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    Rat d = a(col, col);
    for (int j = 0; j < n; ++j) { a(col, j) /= d; inv(col, j) /= d; }
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      Rat f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace pform
