#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pform/jetpoly.hpp"
#include "pform/liealg.hpp"
#include "pform/multitensor.hpp"
#include "pform/rng.hpp"

namespace pform::gerbejet {

/**
 * Module data a section takes values in: gl(n) action T^mu_nu, g action J^a,
 * and the rescaling pair (Lambda, U^rho_{sigma tau}).  All matrices exact.
 */
struct ModuleRep {
  JetSpace sp;
  liealg::RationalAlgebra g;
  int wdim = 1;
  std::vector<RatMat> T;   // n*n, T[mu*n + nu] = T^mu_nu
  std::vector<RatMat> J;   // g.dim
  RatMat Lambda;
  std::vector<RatMat> U;   // n * svars, U[rho*svars + flat]; zero-size => U = 0
  std::string name;

  const RatMat& Tm(int mu, int nu) const { return T[static_cast<size_t>(mu) * sp.n + nu]; }
  bool has_U() const { return !U.empty(); }
  const RatMat& Um(int rho, int flat) const {
    return U[static_cast<size_t>(rho) * sp.svars() + flat];
  }
};

/** W = g-rep only, T = 0, Lambda = lambda Id, U = 0. */
ModuleRep trivial_module(const JetSpace& sp, const liealg::RationalAlgebra& g,
                         const Rat& lambda = 1);
/** W = Q^n (x) g-rep with the standard gl(n) action; Lambda = lambda Id, U = 0. */
ModuleRep vector_module(const JetSpace& sp, const liealg::RationalAlgebra& g,
                        const Rat& lambda = 1);
/**
 * Vector module extended by one weight slot carrying a non-trivial (Lambda, U)
 * realization of the rescaling relations (p = 2 only).
 */
ModuleRep rescale_module(const JetSpace& sp, const liealg::RationalAlgebra& g);

/** Exact check of every relation the module data must satisfy; empty = ok. */
std::vector<std::string> module_relation_defects(const ModuleRep& m);

struct SymmetryGenerator {
  enum class Kind { Vect, Gauge, Rescale };
  Kind kind = Kind::Vect;
  std::vector<JetPoly> comp;  // Vect: n x-only scalars; Gauge: g.dim scalars; Rescale: 1 x-only

  static SymmetryGenerator vect(std::vector<JetPoly> xi);
  static SymmetryGenerator gauge(std::vector<JetPoly> X);
  static SymmetryGenerator rescale(JetPoly F);
};

/** Realization per the generator formulas; satisfies [O_g1,O_g2] = O_[g1,g2]. */
JetPoly realize(const SymmetryGenerator& g, const ModuleRep& m, const JetPoly& phi);

/** Section transformation (the realization with the section-action sign). */
JetPoly apply_generator(const SymmetryGenerator& g, const ModuleRep& m, const JetPoly& phi);

/** Lie bracket of generators (antisymmetric in its arguments). */
SymmetryGenerator bracket(const SymmetryGenerator& g1, const SymmetryGenerator& g2,
                          const JetSpace& sp, const liealg::RationalAlgebra& g);

/** [O_g1, O_g2] phi − O_{[g1,g2]} phi; the zero polynomial when exact. */
JetPoly homomorphism_residual(const SymmetryGenerator& g1, const SymmetryGenerator& g2,
                              const ModuleRep& m, const JetPoly& phi);

/** Verifies the gl(n) relations of s^{mu rho} eth_{nu rho} + T^mu_nu on probes. */
struct GlnCheck {
  Rat max_deviation = 0;
  std::string witness;
};
GlnCheck gl_n_residual(const ModuleRep& m, int probe_degree = 2);

/** Connection triple (A_{a nu}, Gamma^sigma_{tau nu}, B_{a sigma tau}). */
struct GerbeConnection {
  JetSpace sp;
  int gdim = 0;
  std::vector<JetPoly> A;      // gdim * n
  std::vector<JetPoly> Gamma;  // n * n * n, [(sigma*n + tau)*n + nu]
  std::vector<JetPoly> B;      // gdim * svars

  static GerbeConnection zero(const JetSpace& sp, int gdim);
  const JetPoly& a(int ga, int nu) const { return A[static_cast<size_t>(ga) * sp.n + nu]; }
  JetPoly& a(int ga, int nu) { return A[static_cast<size_t>(ga) * sp.n + nu]; }
  const JetPoly& gamma(int sg, int ta, int nu) const {
    return Gamma[(static_cast<size_t>(sg) * sp.n + ta) * sp.n + nu];
  }
  JetPoly& gamma(int sg, int ta, int nu) {
    return Gamma[(static_cast<size_t>(sg) * sp.n + ta) * sp.n + nu];
  }
  const JetPoly& b(int ga, int flat) const { return B[static_cast<size_t>(ga) * sp.svars() + flat]; }
  JetPoly& b(int ga, int flat) { return B[static_cast<size_t>(ga) * sp.svars() + flat]; }
  /** B with arbitrary index order (p = 2): sign-resolved flat access. */
  JetPoly b_pair(int ga, int sigma, int tau) const;
};

/** nabla_nu phi = d_nu phi + Gamma^sigma_{tau nu} T~^tau_sigma phi + A_{a nu} J^a phi. */
JetPoly cov_deriv_x(const GerbeConnection& c, const ModuleRep& m, const JetPoly& phi, int nu);
/** Delta_{flat} phi = eth phi + B_{a,flat} J^a phi. */
JetPoly cov_deriv_s(const GerbeConnection& c, const ModuleRep& m, const JetPoly& phi, int flat);

/** Infinitesimal connection variation for Vect and Gauge generators. */
GerbeConnection transform_connection(const SymmetryGenerator& g, const GerbeConnection& c,
                                     const liealg::RationalAlgebra& alg);

/** Per-nu residuals of delta(nabla_nu phi) − tensor law; all must vanish. */
std::vector<JetPoly> covariance_residuals(const SymmetryGenerator& g, const GerbeConnection& c,
                                          const ModuleRep& m, const JetPoly& phi);
/** Same for the s-derivative Delta_{sigma tau}. */
std::vector<JetPoly> covariance_residuals_s(const SymmetryGenerator& g, const GerbeConnection& c,
                                            const ModuleRep& m, const JetPoly& phi);

struct CurvatureX {
  std::vector<JetPoly> R;  // n*n, coefficient of T~^tau_sigma at [sigma*n+tau]
  std::vector<JetPoly> F;  // gdim, coefficient of J^a
};
CurvatureX curvature_x(const GerbeConnection& c, const ModuleRep& m, int mu, int nu);
/** [nabla_mu, nabla_nu] phi − (R+F) phi; zero when the components are right. */
JetPoly curvature_x_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                   const JetPoly& phi, int mu, int nu);

struct CurvatureS {
  std::vector<JetPoly> G;  // gdim
};
CurvatureS curvature_s(const GerbeConnection& c, const ModuleRep& m, int flat1, int flat2);
JetPoly curvature_s_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                   const JetPoly& phi, int flat1, int flat2);

struct CrossCurvature {
  std::vector<JetPoly> J;    // gdim, coefficient of J^a
  std::vector<JetPoly> Eth;  // svars, coefficient of eth_flat
};
CrossCurvature cross_curvature(const GerbeConnection& c, const ModuleRep& m, int mu, int flat);
JetPoly cross_curvature_probe_residual(const GerbeConnection& c, const ModuleRep& m,
                                       const JetPoly& phi, int mu, int flat);

/** delta_g(s^{st} Delta_{st} phi) − section law; zero exactly (p = 2). */
JetPoly scale_covariance_residual(const SymmetryGenerator& g, const GerbeConnection& c,
                                  const ModuleRep& m, const JetPoly& phi);

// ---------- special gauge (three-form / two-form data) ----------

/**
 * Totally antisymmetric g-valued form components A_{a mu nu rho}(x) (p = 2)
 * or A_{a mu nu}(x) (p = 1), stored on ascending index tuples.
 */
struct AntisymForm {
  JetSpace sp;
  int gdim = 0;
  int rank = 3;                 // 3 for p = 2, 2 for p = 1
  std::vector<JetPoly> comp;    // gdim * n_tuples, x-only scalars

  static AntisymForm zero(const JetSpace& sp, int gdim, int rank);
  int tuples() const;
  int tuple_index(std::vector<int> idx, int& sign) const;  // -1 when repeated index
  JetPoly component(int ga, std::vector<int> idx) const;   // sign-resolved
  JetPoly& at(int ga, int tuple) { return comp[static_cast<size_t>(ga) * tuples() + tuple]; }
  const JetPoly& at(int ga, int tuple) const {
    return comp[static_cast<size_t>(ga) * tuples() + tuple];
  }
};

/** A_{a nu}(x,s) = A_{a nu rho sigma}(x) s^{rho sigma}; Gamma = B = 0. */
GerbeConnection special_gauge_lift(const AntisymForm& a3);

/**
 * Field strength of the special-gauge form.  `pair` carries the components
 * F_{a mu nu rho sigma}(x,s) with F_{a mu nu}(x,s) = pair · s^{rho sigma}
 * exactly; `alt` is the fully antisymmetrised combination
 * Alt(dA) + Alt([A, s·A]) on ascending tuples (rank+1 indices).
 */
struct FormCurvature {
  JetSpace sp;
  int gdim = 0;
  int rank = 3;
  std::vector<JetPoly> pair;  // gdim * n * n * svars: [((a*n+mu)*n+nu)*svars + flat]
  std::vector<JetPoly> alt;   // gdim * C(n, rank+1) ascending tuples
  int alt_tuples() const;
  JetPoly alt_component(int ga, std::vector<int> idx) const;  // sign-resolved
};
FormCurvature form_curvature(const AntisymForm& a, const liealg::RationalAlgebra& alg);

/** Exact residual of F_{a mu nu}(x,s) − pair-component contraction; zero list. */
std::vector<JetPoly> special_gauge_consistency(const AntisymForm& a3, const ModuleRep& m);

/** [X,Y] for s-linear gauge parameters; the defect is the largest |coefficient|. */
Rat subalgebra_closure_defect(const AntisymForm& x2, const AntisymForm& y2,
                              const liealg::RationalAlgebra& alg);

/** s_{rho sigma} d_nu F^{mu nu rho sigma}(x) per mu (abelian, flat metric). */
std::vector<JetPoly> ym_divergence_residual(const AntisymForm& a3);

// ---------- homogeneous flatness -> simplex equations (dense operators) ----------

struct FlatnessReduction {
  multitensor::SitedOperator combination;          // curvature bracket combination at s*
  multitensor::SitedOperator simplex_combination;  // -2 CYBE sum (p=1) or CTetra sum (p=2)
  double residual_abs = 0;
  double cross_check = 0;  // ‖combination − expected‖_F
};

/** p = 1, n = 3: A12, A13, A23 on V⊗3, s* defaults to (1,1,1). */
FlatnessReduction homogeneous_flatness_reduction_p1(
    const std::array<multitensor::SitedOperator, 3>& a,
    const std::array<double, 3>& sstar = {1, 1, 1});

/** p = 2, n = 4: operators on the pair-slot space, s*^{mu nu} = 1. */
FlatnessReduction homogeneous_flatness_reduction_p2(
    const std::map<std::array<int, 3>, multitensor::SitedOperator>& a,
    const std::map<std::pair<int, int>, double>& sstar = {});

// ---------- randomised inputs for identity sweeps ----------

JetPoly random_scalar(const JetSpace& sp, SplitMix& rng, int max_degree, bool x_only,
                      int terms = 4);
SymmetryGenerator random_generator(SymmetryGenerator::Kind kind, const JetSpace& sp,
                                   const liealg::RationalAlgebra& g, SplitMix& rng,
                                   int max_degree = 3);
GerbeConnection random_connection(const JetSpace& sp, const liealg::RationalAlgebra& g,
                                  SplitMix& rng, int max_degree = 2);
JetPoly random_section(const JetSpace& sp, const ModuleRep& m, SplitMix& rng, int max_degree = 2);

}  // namespace pform::gerbejet
