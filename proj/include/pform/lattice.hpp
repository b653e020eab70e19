#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pform/multitensor.hpp"
#include "pform/rng.hpp"

namespace pform::lattice {

using multitensor::Cplx;
using multitensor::Mat;
using multitensor::SitedOperator;

/** Periodic hypercubic lattice, n >= 2, extents >= 2; sites wrap modulo L. */
struct LatticeGeometry {
  int n = 0;
  std::vector<int> L;

  long volume() const;
  long site_index(const std::vector<int>& x) const;
  std::vector<int> site_coords(long s) const;
  long shift(long s, int axis, int step) const;  // axis 0-based
  void validate() const;

  int planes() const { return n * (n - 1) / 2; }
  int plane_index(int mu, int nu) const;            // mu < nu, 0-based axes
  std::pair<int, int> plane_axes(int plane) const;  // (mu, nu), mu < nu
};

enum class Group { U1, SU2, GL };

/** Link variables U_mu(x); U1 is stored as angles in (-pi, pi]. */
struct LinkField {
  LatticeGeometry geom;
  Group group = Group::U1;
  int d = 1;
  std::vector<double> theta;  // U1: volume * n
  std::vector<Mat> U;         // matrix groups: volume * n

  long link_index(long site, int mu) const { return site * geom.n + mu; }
  Mat link(long site, int mu) const;  // always a d x d matrix (U1 -> 1x1 phase)
  static LinkField identity(LatticeGeometry g, Group grp, int d);
};

/**
 * Plaquette transport amplitudes.  Per plaquette (x; mu<nu) two independent
 * operators are stored, NE and NW; SW and SE are the derived inverses
 * (see docs/orientation.md for the in/out link convention).
 */
struct PlaquetteField {
  LatticeGeometry geom;
  int d = 2;
  std::vector<Mat> NE;  // volume * planes, each d^2 x d^2
  std::vector<Mat> NW;

  long plaq_index(long site, int plane) const { return site * geom.planes() + plane; }
  static PlaquetteField identity(LatticeGeometry g, int d);
};

/** Abelian 2-form angles theta_{mu nu}(x) in (-pi, pi]; optional Z_N restriction. */
struct AbelianPlaquetteAngles {
  LatticeGeometry geom;
  std::vector<double> theta;  // volume * planes
  std::optional<int> zn;

  long plaq_index(long site, int plane) const { return site * geom.planes() + plane; }
};

// --- 1-form operations ---

/** Holonomy around the (mu,nu) plaquette at x, composed in path order. */
Mat plaquette_holonomy(const LinkField& links, long site, int mu, int nu);

/** S = -beta * sum_{x, mu<nu} Re tr P(x; mu nu). */
double wilson_action_links(const LinkField& links, double beta);

/** U_mu(x) -> f(x+mu)^{-1} U_mu(x) f(x). */
LinkField gauge_transform_links(const LinkField& links, const std::vector<Mat>& f);

struct PathStep {
  int axis;  // 0-based
  int dir;   // +1 or -1
};

/** Trace of the ordered product along a closed path from `start`. */
Cplx wilson_loop(const LinkField& links, long start, const std::vector<PathStep>& path);

// --- 2-form operations ---

/** Directed-diagonal role of a plaquette amplitude. */
enum class Diag { NE, NW, SE, SW };

Mat plaquette_transport(const PlaquetteField& plaq, long site, int plane, Diag diag);

/**
 * Six-factor cube holonomy on V (x) V (x) V for the cube at x spanned by
 * axes mu < nu < rho (0-based); slots (1,2,3) carry the three directions.
 */
SitedOperator cube_holonomy(const PlaquetteField& plaq, long site, int mu, int nu, int rho);

/** One of the eight directed-diagonal cube terms; eps[k] = +1/-1 per axis. */
SitedOperator cube_holonomy_directed(const PlaquetteField& plaq, long site, int mu, int nu,
                                     int rho, const std::array<int, 3>& eps);

/** S = -beta * sum_cubes sum_{8 diagonals} Re tr(.); requires n >= 3. */
double action_cubes(const PlaquetteField& plaq, double beta);

/** f is one group element per link, indexed like LinkField links. */
PlaquetteField gauge_transform_plaquettes(const PlaquetteField& plaq, const std::vector<Mat>& f);

/**
 * Spatially homogeneous field reproducing the given operators: the cube
 * holonomy becomes U12 U13 U23 U12^-1 U13^-1 U23^-1 exactly.
 */
PlaquetteField homogeneous_plaquette_field(const LatticeGeometry& g, const Mat& u12,
                                           const Mat& u13, const Mat& u23);

// --- Wilson surfaces ---

struct LinkId {
  int axis;   // 0-based
  long site;  // base site of the link
  auto operator<=>(const LinkId&) const = default;
};

struct SurfacePlaquette {
  long site;
  int plane;
  Diag diag;
};

struct SurfacePatch {
  std::vector<SurfacePlaquette> plaqs;
};

/** m x k flat patch of NE amplitudes in the (mu,nu) plane based at x0. */
SurfacePatch flat_patch(const LatticeGeometry& g, long x0, int mu, int nu, int m, int k);

/** Closed boundary of an a x b x c cuboid spanned by axes mu < nu < rho. */
SurfacePatch cuboid_boundary(const LatticeGeometry& g, long x0, int mu, int nu, int rho, int a,
                             int b, int c);

struct SurfaceTensor {
  std::vector<LinkId> in_links;   // sorted by (axis, site)
  std::vector<LinkId> out_links;  // sorted by (axis, site)
  Mat data;                       // rows over out links, cols over in links
  bool closed = false;
  Cplx scalar = 0;                // the full contraction when closed
};

/**
 * Contracts the plaquette tensors of the patch over every shared link
 * (out-index against the matching in-index); boundary links stay free.
 * `order`, when given, fixes the contraction order; the result is
 * order-independent.
 */
SurfaceTensor wilson_surface(const PlaquetteField& plaq, const SurfacePatch& patch,
                             const std::vector<int>& order = {});

// --- abelian field strength ---

/** Oriented boundary sum of the six plaquette angles of a cube (lattice d theta). */
double cube_field_strength(const AbelianPlaquetteAngles& th, long site, int mu, int nu, int rho);

struct BianchiCheck {
  double value = 0;          // exact pairwise-cancelled sum (0 when the stencil is consistent)
  double float_sum = 0;      // naive floating sum of the 8 cube strengths
  bool coefficients_ok = false;
};

/** Oriented 4-cell sum of the 8 cube field strengths; cancels plaquette-by-plaquette. */
BianchiCheck four_cell_bianchi(const AbelianPlaquetteAngles& th, long site, int mu, int nu,
                               int rho, int sigma);

// --- random data (deterministic) ---

Mat random_unitary(int d, SplitMix& rng);
Mat random_gl(int d, SplitMix& rng, double spread = 0.2);
LinkField random_links(LatticeGeometry g, Group grp, int d, uint64_t seed);
PlaquetteField random_plaquettes(LatticeGeometry g, int d, uint64_t seed, bool unitary = false);
std::vector<Mat> random_gauge(const LatticeGeometry& g, int nper, int d, uint64_t seed);
AbelianPlaquetteAngles random_angles(LatticeGeometry g, uint64_t seed);

// --- Monte Carlo ---

struct McConfig {
  std::vector<int> dims;
  int form_degree = 1;  // 1: U1 links, 2: abelian plaquette angles
  double beta = 1.0;
  int sweeps = 1000;
  int burnin = 100;
  uint64_t seed = 1;
  int threads = 1;
  std::string history_file;  // optional
};

struct McResult {
  double mean_observable = 0;  // mean plaquette cos (form 1) or mean cube cos (form 2)
  double stderr_observable = 0;
  double acceptance = 0;
  double proposal_width = 0;
  std::vector<double> action_history;
  std::vector<double> observable_history;
};

/** Metropolis with per-variable counter-based RNG streams; deterministic per seed. */
McResult mc_metropolis_abelian(const McConfig& cfg);

/** <cos theta> of the single-plaquette weight exp(beta cos theta), by quadrature. */
double plaquette_oracle(double beta, int grid = 4096);

}  // namespace pform::lattice
