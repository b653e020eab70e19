#include "pform/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace pform::lattice {

// --- geometry ---

void LatticeGeometry::validate() const {
  if (n < 2) throw std::invalid_argument("lattice dimension must be >= 2");
  if (static_cast<int>(L.size()) != n) throw std::invalid_argument("extent list size mismatch");
  for (int l : L)
    if (l < 2) throw std::invalid_argument("lattice extents must be >= 2");
}

long LatticeGeometry::volume() const {
  long v = 1;
  for (int l : L) v *= l;
  return v;
}

long LatticeGeometry::site_index(const std::vector<int>& x) const {
  long s = 0;
  for (int k = 0; k < n; ++k) {
    int c = ((x[k] % L[k]) + L[k]) % L[k];
    s = s * L[k] + c;
  }
  return s;
}

std::vector<int> LatticeGeometry::site_coords(long s) const {
  std::vector<int> x(n);
  for (int k = n - 1; k >= 0; --k) {
    x[k] = static_cast<int>(s % L[k]);
    s /= L[k];
  }
  return x;
}

long LatticeGeometry::shift(long s, int axis, int step) const {
  auto x = site_coords(s);
  x[axis] = ((x[axis] + step) % L[axis] + L[axis]) % L[axis];
  return site_index(x);
}

int LatticeGeometry::plane_index(int mu, int nu) const {
  if (mu > nu) std::swap(mu, nu);
  if (mu < 0 || nu >= n || mu == nu) throw std::invalid_argument("bad plane axes");
  // lexicographic over pairs mu < nu
  int idx = 0;
  for (int a = 0; a < mu; ++a) idx += n - 1 - a;
  return idx + (nu - mu - 1);
}

std::pair<int, int> LatticeGeometry::plane_axes(int plane) const {
  for (int a = 0; a < n; ++a) {
    int block = n - 1 - a;
    if (plane < block) return {a, a + 1 + plane};
    plane -= block;
  }
  throw std::invalid_argument("plane index out of range");
}

// --- link fields ---

Mat LinkField::link(long site, int mu) const {
  if (group == Group::U1) {
    Mat m(1, 1);
    double t = theta[static_cast<size_t>(link_index(site, mu))];
    m(0, 0) = Cplx(std::cos(t), std::sin(t));
    return m;
  }
  return U[static_cast<size_t>(link_index(site, mu))];
}

LinkField LinkField::identity(LatticeGeometry g, Group grp, int d) {
  g.validate();
  LinkField f;
  f.geom = std::move(g);
  f.group = grp;
  f.d = grp == Group::U1 ? 1 : d;
  long nl = f.geom.volume() * f.geom.n;
  if (grp == Group::U1)
    f.theta.assign(static_cast<size_t>(nl), 0.0);
  else
    f.U.assign(static_cast<size_t>(nl), Mat::Identity(d, d));
  return f;
}

PlaquetteField PlaquetteField::identity(LatticeGeometry g, int d) {
  g.validate();
  PlaquetteField f;
  f.geom = std::move(g);
  f.d = d;
  long np = f.geom.volume() * f.geom.planes();
  f.NE.assign(static_cast<size_t>(np), Mat::Identity(d * d, d * d));
  f.NW.assign(static_cast<size_t>(np), Mat::Identity(d * d, d * d));
  return f;
}

// --- 1-form operations ---

Mat plaquette_holonomy(const LinkField& links, long site, int mu, int nu) {
  const auto& g = links.geom;
  if (mu == nu || mu < 0 || nu < 0 || mu >= g.n || nu >= g.n)
    throw std::invalid_argument("plaquette_holonomy: bad directions");
  long xmu = g.shift(site, mu, 1);
  long xnu = g.shift(site, nu, 1);
  // Path order U_mu(x) U_nu(x+mu) U_mu(x+nu)^-1 U_nu(x)^-1, composed right to left.
  return links.link(site, nu).inverse() * links.link(xnu, mu).inverse() *
         links.link(xmu, nu) * links.link(site, mu);
}

double wilson_action_links(const LinkField& links, double beta) {
  const auto& g = links.geom;
  double s = 0;
  for (long x = 0; x < g.volume(); ++x)
    for (int mu = 0; mu < g.n; ++mu)
      for (int nu = mu + 1; nu < g.n; ++nu)
        s += plaquette_holonomy(links, x, mu, nu).trace().real();
  return -beta * s;
}

LinkField gauge_transform_links(const LinkField& links, const std::vector<Mat>& f) {
  const auto& g = links.geom;
  if (static_cast<long>(f.size()) != g.volume())
    throw std::invalid_argument("gauge_transform_links: one element per site required");
  LinkField out = links;
  for (long x = 0; x < g.volume(); ++x)
    for (int mu = 0; mu < g.n; ++mu) {
      long xm = g.shift(x, mu, 1);
      if (links.group == Group::U1) {
        double a = std::arg(f[static_cast<size_t>(x)](0, 0));
        double b = std::arg(f[static_cast<size_t>(xm)](0, 0));
        double t = links.theta[static_cast<size_t>(links.link_index(x, mu))] + a - b;
        out.theta[static_cast<size_t>(out.link_index(x, mu))] = std::remainder(t, 2 * M_PI);
      } else {
        out.U[static_cast<size_t>(out.link_index(x, mu))] =
            f[static_cast<size_t>(xm)].inverse() * links.U[static_cast<size_t>(links.link_index(x, mu))] *
            f[static_cast<size_t>(x)];
      }
    }
  return out;
}

Cplx wilson_loop(const LinkField& links, long start, const std::vector<PathStep>& path) {
  const auto& g = links.geom;
  long x = start;
  Mat m = Mat::Identity(links.d, links.d);
  for (const auto& st : path) {
    if (st.axis < 0 || st.axis >= g.n) throw std::invalid_argument("wilson_loop: bad axis");
    if (st.dir == 1) {
      m = links.link(x, st.axis) * m;
      x = g.shift(x, st.axis, 1);
    } else if (st.dir == -1) {
      long y = g.shift(x, st.axis, -1);
      m = links.link(y, st.axis).inverse() * m;
      x = y;
    } else {
      throw std::invalid_argument("wilson_loop: step direction must be +1/-1");
    }
  }
  if (x != start) throw std::invalid_argument("wilson_loop: path is not closed");
  return m.trace();
}

// --- plaquette transports and the cube ---

Mat plaquette_transport(const PlaquetteField& plaq, long site, int plane, Diag diag) {
  const Mat& ne = plaq.NE[static_cast<size_t>(plaq.plaq_index(site, plane))];
  const Mat& nw = plaq.NW[static_cast<size_t>(plaq.plaq_index(site, plane))];
  switch (diag) {
    case Diag::NE: return ne;
    case Diag::NW: return nw;
    case Diag::SE: return nw.inverse();
    case Diag::SW: return ne.inverse();
  }
  throw std::logic_error("unreachable");
}

namespace {

struct CubeFactor {
  int pa, pb;               // plane axes as positions in the cube axis triple (0,1,2), pa < pb
  std::array<int, 3> off;   // corner offset of the plaquette base within the cube
  Diag diag;
};

// Principal (all-positive) diagonal term; see docs/orientation.md.
constexpr std::array<CubeFactor, 6> kPrincipal = {{
    {0, 1, {0, 0, 0}, Diag::NE},
    {0, 2, {0, 0, 0}, Diag::SE},
    {1, 2, {0, 0, 0}, Diag::SW},
    {0, 1, {0, 0, 1}, Diag::SW},
    {0, 2, {0, 1, 0}, Diag::NW},
    {1, 2, {1, 0, 0}, Diag::NE},
}};

Diag flip_horizontal(Diag d) {
  switch (d) {
    case Diag::NE: return Diag::NW;
    case Diag::NW: return Diag::NE;
    case Diag::SE: return Diag::SW;
    case Diag::SW: return Diag::SE;
  }
  throw std::logic_error("unreachable");
}

Diag flip_vertical(Diag d) {
  switch (d) {
    case Diag::NE: return Diag::SE;
    case Diag::SE: return Diag::NE;
    case Diag::NW: return Diag::SW;
    case Diag::SW: return Diag::NW;
  }
  throw std::logic_error("unreachable");
}

CubeFactor reflect(CubeFactor f, const std::array<int, 3>& eps) {
  for (int k = 0; k < 3; ++k) {
    if (eps[k] == 1) continue;
    if (k == f.pa)
      f.diag = flip_horizontal(f.diag);
    else if (k == f.pb)
      f.diag = flip_vertical(f.diag);
    else
      f.off[k] = 1 - f.off[k];
  }
  return f;
}

}  // namespace

SitedOperator cube_holonomy_directed(const PlaquetteField& plaq, long site, int mu, int nu,
                                     int rho, const std::array<int, 3>& eps) {
  const auto& g = plaq.geom;
  if (!(mu < nu && nu < rho)) throw std::invalid_argument("cube axes must satisfy mu<nu<rho");
  const std::array<int, 3> axes = {mu, nu, rho};
  const int d = plaq.d;
  std::vector<int> dims = {d, d, d};
  SitedOperator prod = SitedOperator::identity(dims, {});
  for (const auto& f0 : kPrincipal) {
    CubeFactor f = reflect(f0, eps);
    long base = site;
    for (int k = 0; k < 3; ++k)
      if (f.off[k]) base = g.shift(base, axes[k], 1);
    int plane = g.plane_index(axes[f.pa], axes[f.pb]);
    Mat m = plaquette_transport(plaq, base, plane, f.diag);
    auto op = SitedOperator::on_slots({d, d}, {1, 2}, std::move(m));
    auto emb = multitensor::embed(op, 3, {{1, f.pa + 1}, {2, f.pb + 1}}, dims);
    prod = multitensor::multiply(prod, emb);
  }
  return prod;
}

SitedOperator cube_holonomy(const PlaquetteField& plaq, long site, int mu, int nu, int rho) {
  return cube_holonomy_directed(plaq, site, mu, nu, rho, {1, 1, 1});
}

double action_cubes(const PlaquetteField& plaq, double beta) {
  const auto& g = plaq.geom;
  if (g.n < 3) throw std::invalid_argument("action_cubes requires n >= 3");
  double s = 0;
  for (long x = 0; x < g.volume(); ++x)
    for (int mu = 0; mu < g.n; ++mu)
      for (int nu = mu + 1; nu < g.n; ++nu)
        for (int rho = nu + 1; rho < g.n; ++rho)
          for (int bits = 0; bits < 8; ++bits) {
            std::array<int, 3> eps = {bits & 1 ? -1 : 1, bits & 2 ? -1 : 1, bits & 4 ? -1 : 1};
            auto h = cube_holonomy_directed(plaq, x, mu, nu, rho, eps);
            s += multitensor::ambient_trace(h).real();
          }
  return -beta * s;
}

PlaquetteField gauge_transform_plaquettes(const PlaquetteField& plaq,
                                          const std::vector<Mat>& f) {
  const auto& g = plaq.geom;
  if (static_cast<long>(f.size()) != g.volume() * g.n)
    throw std::invalid_argument("gauge_transform_plaquettes: one element per link required");
  auto fl = [&](long site, int axis) -> const Mat& {
    return f[static_cast<size_t>(site * g.n + axis)];
  };
  auto kron = [](const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
      for (long j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  PlaquetteField out = plaq;
  for (long x = 0; x < g.volume(); ++x)
    for (int p = 0; p < g.planes(); ++p) {
      auto [a, b] = g.plane_axes(p);
      long xa = g.shift(x, a, 1), xb = g.shift(x, b, 1);
      long idx = plaq.plaq_index(x, p);
      // NE: in (a@x, b@x) -> out (a@x+b, b@x+a)
      out.NE[static_cast<size_t>(idx)] = kron(fl(xb, a), fl(xa, b)).inverse() *
                                         plaq.NE[static_cast<size_t>(idx)] *
                                         kron(fl(x, a), fl(x, b));
      // NW: in (a@x, b@x+a) -> out (a@x+b, b@x)
      out.NW[static_cast<size_t>(idx)] = kron(fl(xb, a), fl(x, b)).inverse() *
                                         plaq.NW[static_cast<size_t>(idx)] *
                                         kron(fl(x, a), fl(xa, b));
    }
  return out;
}

PlaquetteField homogeneous_plaquette_field(const LatticeGeometry& g, const Mat& u12,
                                           const Mat& u13, const Mat& u23) {
  if (g.n != 3) throw std::invalid_argument("homogeneous_plaquette_field: n must be 3");
  int d2 = static_cast<int>(u12.rows());
  int d = static_cast<int>(std::lround(std::sqrt(double(d2))));
  if (d * d != d2) throw std::invalid_argument("operator size must be a perfect square");
  PlaquetteField f = PlaquetteField::identity(g, d);
  Mat u13inv = u13.inverse(), u23inv = u23.inverse();
  for (long x = 0; x < g.volume(); ++x) {
    f.NE[static_cast<size_t>(f.plaq_index(x, g.plane_index(0, 1)))] = u12;
    f.NW[static_cast<size_t>(f.plaq_index(x, g.plane_index(0, 2)))] = u13inv;
    f.NE[static_cast<size_t>(f.plaq_index(x, g.plane_index(1, 2)))] = u23inv;
  }
  return f;
}

// --- Wilson surfaces ---

SurfacePatch flat_patch(const LatticeGeometry& g, long x0, int mu, int nu, int m, int k) {
  if (mu >= nu) throw std::invalid_argument("flat_patch: need mu < nu");
  SurfacePatch p;
  int plane = g.plane_index(mu, nu);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      long s = x0;
      for (int t = 0; t < i; ++t) s = g.shift(s, mu, 1);
      for (int t = 0; t < j; ++t) s = g.shift(s, nu, 1);
      p.plaqs.push_back({s, plane, Diag::NE});
    }
  return p;
}

SurfacePatch cuboid_boundary(const LatticeGeometry& g, long x0, int mu, int nu, int rho, int a,
                             int b, int c) {
  if (!(mu < nu && nu < rho)) throw std::invalid_argument("cuboid_boundary: need mu<nu<rho");
  if (a < 1 || b < 1 || c < 1) throw std::invalid_argument("cuboid_boundary: bad extents");
  SurfacePatch p;
  auto at = [&](int i, int j, int k) {
    long s = x0;
    for (int t = 0; t < i; ++t) s = g.shift(s, mu, 1);
    for (int t = 0; t < j; ++t) s = g.shift(s, nu, 1);
    for (int t = 0; t < k; ++t) s = g.shift(s, rho, 1);
    return s;
  };
  int pab = g.plane_index(mu, nu), pac = g.plane_index(mu, rho), pbc = g.plane_index(nu, rho);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) {
      p.plaqs.push_back({at(i, j, 0), pab, Diag::NE});  // bottom
      p.plaqs.push_back({at(i, j, c), pab, Diag::SW});  // top
    }
  for (int i = 0; i < a; ++i)
    for (int k = 0; k < c; ++k) {
      p.plaqs.push_back({at(i, 0, k), pac, Diag::SE});  // front
      p.plaqs.push_back({at(i, b, k), pac, Diag::NW});  // back
    }
  for (int j = 0; j < b; ++j)
    for (int k = 0; k < c; ++k) {
      p.plaqs.push_back({at(0, j, k), pbc, Diag::SW});  // left
      p.plaqs.push_back({at(a, j, k), pbc, Diag::NE});  // right
    }
  return p;
}

namespace {

struct Leg {
  LinkId link;
  bool out;
};

struct OpenTensor {
  std::vector<Leg> legs;
  std::vector<Cplx> data;  // row-major over legs, each dim d
  int d = 2;

  size_t size() const { return data.size(); }
};

OpenTensor permuted(const OpenTensor& t, const std::vector<int>& order) {
  OpenTensor out;
  out.d = t.d;
  out.legs.reserve(t.legs.size());
  for (int o : order) out.legs.push_back(t.legs[static_cast<size_t>(o)]);
  out.data.assign(t.data.size(), Cplx(0, 0));
  const size_t k = t.legs.size();
  std::vector<int> idx(k, 0);
  std::vector<long> stride_new(k);
  // stride of old leg position o in the new layout
  std::vector<long> new_pos(k);
  for (size_t np = 0; np < k; ++np) new_pos[static_cast<size_t>(order[np])] = static_cast<long>(np);
  std::vector<long> strides(k, 1);
  for (size_t i = k; i-- > 1;) strides[i - 1] = strides[i] * t.d;
  (void)stride_new;
  for (size_t flat = 0; flat < t.data.size(); ++flat) {
    long nf = 0;
    size_t rem = flat;
    // decode old multi-index then re-encode in new order
    for (size_t i = 0; i < k; ++i) {
      idx[i] = static_cast<int>(rem / static_cast<size_t>(strides[i]));
      rem %= static_cast<size_t>(strides[i]);
    }
    for (size_t np = 0; np < k; ++np) nf = nf * t.d + idx[static_cast<size_t>(order[np])];
    out.data[static_cast<size_t>(nf)] = t.data[flat];
  }
  return out;
}

// Tensor of one surface plaquette: legs [out_a, out_b, in_a, in_b].
OpenTensor plaquette_tensor(const PlaquetteField& plaq, const SurfacePlaquette& sp) {
  const auto& g = plaq.geom;
  auto [a, b] = g.plane_axes(sp.plane);
  long xa = g.shift(sp.site, a, 1), xb = g.shift(sp.site, b, 1);
  LinkId a_at_x{a, sp.site}, a_at_xb{a, xb}, b_at_x{b, sp.site}, b_at_xa{b, xa};
  OpenTensor t;
  t.d = plaq.d;
  switch (sp.diag) {
    case Diag::NE: t.legs = {{a_at_xb, true}, {b_at_xa, true}, {a_at_x, false}, {b_at_x, false}}; break;
    case Diag::NW: t.legs = {{a_at_xb, true}, {b_at_x, true}, {a_at_x, false}, {b_at_xa, false}}; break;
    case Diag::SE: t.legs = {{a_at_x, true}, {b_at_xa, true}, {a_at_xb, false}, {b_at_x, false}}; break;
    case Diag::SW: t.legs = {{a_at_x, true}, {b_at_x, true}, {a_at_xb, false}, {b_at_xa, false}}; break;
  }
  Mat m = plaquette_transport(plaq, sp.site, sp.plane, sp.diag);
  const int d = plaq.d;
  t.data.resize(static_cast<size_t>(d) * d * d * d);
  for (int oa = 0; oa < d; ++oa)
    for (int ob = 0; ob < d; ++ob)
      for (int ia = 0; ia < d; ++ia)
        for (int ib = 0; ib < d; ++ib)
          t.data[static_cast<size_t>(((oa * d + ob) * d + ia)) * d + ib] =
              m(oa * d + ob, ia * d + ib);
  return t;
}

OpenTensor contract(const OpenTensor& t, const OpenTensor& p, std::set<LinkId>& spent) {
  // matched pairs: equal link, opposite orientation
  std::vector<int> t_matched, p_matched;
  for (size_t i = 0; i < p.legs.size(); ++i) {
    const auto& pl = p.legs[i];
    if (spent.count(pl.link))
      throw std::invalid_argument("wilson_surface: non-manifold gluing (link used twice)");
    for (size_t j = 0; j < t.legs.size(); ++j) {
      const auto& tl = t.legs[j];
      if (tl.link != pl.link) continue;
      if (tl.out == pl.out)
        throw std::invalid_argument("wilson_surface: inconsistent orientation at a shared link");
      t_matched.push_back(static_cast<int>(j));
      p_matched.push_back(static_cast<int>(i));
    }
  }
  // reorder: t -> [unmatched..., matched...], p -> [matched..., unmatched...]
  std::vector<int> t_order, p_order;
  for (size_t j = 0; j < t.legs.size(); ++j)
    if (std::find(t_matched.begin(), t_matched.end(), static_cast<int>(j)) == t_matched.end())
      t_order.push_back(static_cast<int>(j));
  size_t t_free = t_order.size();
  for (int j : t_matched) t_order.push_back(j);
  for (int i : p_matched) p_order.push_back(i);
  for (size_t i = 0; i < p.legs.size(); ++i)
    if (std::find(p_matched.begin(), p_matched.end(), static_cast<int>(i)) == p_matched.end())
      p_order.push_back(static_cast<int>(i));

  OpenTensor tp = permuted(t, t_order);
  OpenTensor pp = permuted(p, p_order);
  const size_t m = t_matched.size();
  long dm = 1;
  for (size_t i = 0; i < m; ++i) dm *= t.d;
  long rows = static_cast<long>(tp.size()) / dm;
  long cols = static_cast<long>(pp.size()) / dm;

  OpenTensor out;
  out.d = t.d;
  for (size_t i = 0; i < t_free; ++i) out.legs.push_back(tp.legs[i]);
  for (size_t i = m; i < pp.legs.size(); ++i) out.legs.push_back(pp.legs[i]);
  out.data.assign(static_cast<size_t>(rows) * cols, Cplx(0, 0));
  for (long r = 0; r < rows; ++r)
    for (long q = 0; q < dm; ++q) {
      Cplx tv = tp.data[static_cast<size_t>(r * dm + q)];
      if (tv == Cplx(0, 0)) continue;
      for (long c = 0; c < cols; ++c)
        out.data[static_cast<size_t>(r * cols + c)] += tv * pp.data[static_cast<size_t>(q * cols + c)];
    }
  for (int i : p_matched) spent.insert(p.legs[static_cast<size_t>(i)].link);
  return out;
}

}  // namespace

SurfaceTensor wilson_surface(const PlaquetteField& plaq, const SurfacePatch& patch,
                             const std::vector<int>& order) {
  if (patch.plaqs.empty()) throw std::invalid_argument("wilson_surface: empty patch");
  std::vector<int> seq(patch.plaqs.size());
  for (size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<int>(i);
  if (!order.empty()) {
    if (order.size() != seq.size()) throw std::invalid_argument("wilson_surface: bad order");
    seq = order;
  }
  std::set<LinkId> spent;
  OpenTensor acc = plaquette_tensor(plaq, patch.plaqs[static_cast<size_t>(seq[0])]);
  for (size_t k = 1; k < seq.size(); ++k)
    acc = contract(acc, plaquette_tensor(plaq, patch.plaqs[static_cast<size_t>(seq[k])]), spent);

  SurfaceTensor st;
  if (acc.legs.empty()) {
    st.closed = true;
    st.scalar = acc.data[0];
    st.data = Mat::Zero(1, 1);
    st.data(0, 0) = st.scalar;
    return st;
  }
  // canonical leg order: out legs then in legs, each sorted by (axis, site)
  std::vector<int> outs, ins;
  for (size_t i = 0; i < acc.legs.size(); ++i)
    (acc.legs[i].out ? outs : ins).push_back(static_cast<int>(i));
  auto by_link = [&](int x, int y) { return acc.legs[static_cast<size_t>(x)].link < acc.legs[static_cast<size_t>(y)].link; };
  std::sort(outs.begin(), outs.end(), by_link);
  std::sort(ins.begin(), ins.end(), by_link);
  std::vector<int> perm = outs;
  perm.insert(perm.end(), ins.begin(), ins.end());
  OpenTensor fin = permuted(acc, perm);
  long rows = 1, cols = 1;
  for (size_t i = 0; i < outs.size(); ++i) rows *= fin.d;
  for (size_t i = 0; i < ins.size(); ++i) cols *= fin.d;
  st.data = Mat::Zero(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) st.data(r, c) = fin.data[static_cast<size_t>(r * cols + c)];
  for (int i : outs) st.out_links.push_back(acc.legs[static_cast<size_t>(i)].link);
  for (int i : ins) st.in_links.push_back(acc.legs[static_cast<size_t>(i)].link);
  return st;
}

// --- abelian field strength ---

namespace {

// Stencil of (d theta)_{mu nu rho}: plaquette angle entries with +/-1 weights.
void cube_stencil(const LatticeGeometry& g, long site, int mu, int nu, int rho,
                  std::map<std::pair<long, int>, int>& coeff) {
  int pmn = g.plane_index(mu, nu), pmr = g.plane_index(mu, rho), pnr = g.plane_index(nu, rho);
  coeff[{g.shift(site, mu, 1), pnr}] += 1;
  coeff[{site, pnr}] -= 1;
  coeff[{g.shift(site, nu, 1), pmr}] -= 1;
  coeff[{site, pmr}] += 1;
  coeff[{g.shift(site, rho, 1), pmn}] += 1;
  coeff[{site, pmn}] -= 1;
}

}  // namespace

double cube_field_strength(const AbelianPlaquetteAngles& th, long site, int mu, int nu,
                           int rho) {
  std::map<std::pair<long, int>, int> coeff;
  cube_stencil(th.geom, site, mu, nu, rho, coeff);
  double f = 0;
  for (const auto& [key, c] : coeff)
    f += c * th.theta[static_cast<size_t>(th.plaq_index(key.first, key.second))];
  return f;
}

BianchiCheck four_cell_bianchi(const AbelianPlaquetteAngles& th, long site, int mu, int nu,
                               int rho, int sigma) {
  const auto& g = th.geom;
  if (!(mu < nu && nu < rho && rho < sigma))
    throw std::invalid_argument("four_cell_bianchi: need mu<nu<rho<sigma");
  const std::array<int, 4> ax = {mu, nu, rho, sigma};
  BianchiCheck out;
  std::map<std::pair<long, int>, int> coeff;
  double fsum = 0;
  for (int k = 0; k < 4; ++k) {
    std::array<int, 3> tri{};
    int t = 0;
    for (int j = 0; j < 4; ++j)
      if (j != k) tri[static_cast<size_t>(t++)] = ax[static_cast<size_t>(j)];
    int sign = (k % 2 == 0) ? 1 : -1;
    long shifted = g.shift(site, ax[static_cast<size_t>(k)], 1);
    // sign * (F(x + k-hat) - F(x)) over the cube omitting axis k
    std::map<std::pair<long, int>, int> c1, c0;
    cube_stencil(g, shifted, tri[0], tri[1], tri[2], c1);
    cube_stencil(g, site, tri[0], tri[1], tri[2], c0);
    for (const auto& [key, c] : c1) coeff[key] += sign * c;
    for (const auto& [key, c] : c0) coeff[key] -= sign * c;
    fsum += sign * (cube_field_strength(th, shifted, tri[0], tri[1], tri[2]) -
                    cube_field_strength(th, site, tri[0], tri[1], tri[2]));
  }
  out.coefficients_ok = true;
  for (const auto& [key, c] : coeff)
    if (c != 0) out.coefficients_ok = false;
  double v = 0;
  for (const auto& [key, c] : coeff)
    if (c != 0) v += c * th.theta[static_cast<size_t>(th.plaq_index(key.first, key.second))];
  out.value = v;
  out.float_sum = fsum;
  return out;
}

// --- random data ---

Mat random_unitary(int d, SplitMix& rng) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Cplx(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Cplx ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

Mat random_gl(int d, SplitMix& rng, double spread) {
  Mat u = random_unitary(d, rng);
  Mat v = random_unitary(d, rng);
  Eigen::VectorXcd diag(d);
  for (int i = 0; i < d; ++i) diag(i) = std::exp(spread * (rng.uniform() - 0.5));
  return u * diag.asDiagonal() * v;
}

LinkField random_links(LatticeGeometry g, Group grp, int d, uint64_t seed) {
  LinkField f = LinkField::identity(std::move(g), grp, d);
  long nl = f.geom.volume() * f.geom.n;
  for (long i = 0; i < nl; ++i) {
    SplitMix rng(seed, static_cast<uint64_t>(i), 0);
    if (grp == Group::U1) {
      f.theta[static_cast<size_t>(i)] = rng.uniform(-M_PI, M_PI);
    } else if (grp == Group::SU2) {
      double q0 = rng.gaussian(), q1 = rng.gaussian(), q2 = rng.gaussian(), q3 = rng.gaussian();
      double nq = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
      q0 /= nq; q1 /= nq; q2 /= nq; q3 /= nq;
      Mat m(2, 2);
      m(0, 0) = Cplx(q0, q1);
      m(0, 1) = Cplx(q2, q3);
      m(1, 0) = Cplx(-q2, q3);
      m(1, 1) = Cplx(q0, -q1);
      f.U[static_cast<size_t>(i)] = m;
    } else {
      f.U[static_cast<size_t>(i)] = random_gl(d, rng);
    }
  }
  return f;
}

PlaquetteField random_plaquettes(LatticeGeometry g, int d, uint64_t seed, bool unitary) {
  PlaquetteField f = PlaquetteField::identity(std::move(g), d);
  long np = f.geom.volume() * f.geom.planes();
  for (long i = 0; i < np; ++i) {
    SplitMix rng(seed, static_cast<uint64_t>(i), 1);
    f.NE[static_cast<size_t>(i)] = unitary ? random_unitary(d * d, rng) : random_gl(d * d, rng);
    f.NW[static_cast<size_t>(i)] = unitary ? random_unitary(d * d, rng) : random_gl(d * d, rng);
  }
  return f;
}

std::vector<Mat> random_gauge(const LatticeGeometry& g, int nper, int d, uint64_t seed) {
  std::vector<Mat> f(static_cast<size_t>(g.volume() * nper));
  for (size_t i = 0; i < f.size(); ++i) {
    SplitMix rng(seed, static_cast<uint64_t>(i), 2);
    f[i] = random_unitary(d, rng);
  }
  return f;
}

AbelianPlaquetteAngles random_angles(LatticeGeometry g, uint64_t seed) {
  g.validate();
  AbelianPlaquetteAngles th;
  th.geom = std::move(g);
  th.theta.resize(static_cast<size_t>(th.geom.volume() * th.geom.planes()));
  for (size_t i = 0; i < th.theta.size(); ++i) {
    SplitMix rng(seed, static_cast<uint64_t>(i), 3);
    th.theta[i] = rng.uniform(-M_PI, M_PI);
  }
  return th;
}

}  // namespace pform::lattice
