#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pform/multitensor.hpp"
#include "pform/rational.hpp"

namespace pform::liealg {

/**
 * Finite-dimensional Lie algebra by exact structure constants
 * f[a][b][c] = f^{ab}_c, with an invertible invariant metric.  For u1 the
 * metric is the 1x1 identity and for gl(n) the trace form; both are declared
 * substitutes, since the true Killing form degenerates there.
 */
struct LieAlgebraSpec {
  std::string name;
  int dim = 0;
  std::vector<Rat> f;  // dim^3, index a*dim*dim + b*dim + c
  RatMat killing;      // dim x dim, symmetric, invertible
  std::string basis_note;

  const Rat& fc(int a, int b, int c) const {
    return f[(static_cast<size_t>(a) * dim + b) * dim + c];
  }
  Rat& fc(int a, int b, int c) { return f[(static_cast<size_t>(a) * dim + b) * dim + c]; }
};

/** Matrix representation; complex entries, exact-rational twin kept when available. */
struct MatrixRep {
  LieAlgebraSpec algebra;
  int d = 0;
  std::vector<multitensor::Mat> J;    // dim matrices, d x d
  std::vector<RatMat> J_exact;        // empty when the rep is genuinely complex
  bool exact() const { return !J_exact.empty(); }
};

/**
 * Shipped algebras: "u1", "sl2", "su2", "gl1".."gl4".
 * Basis conventions: sl2 in the Chevalley basis (e,f,h); su2 with
 * anti-Hermitian generators (i/2)sigma_a, so f^{ab}_c = -eps_{abc}.
 */
std::pair<LieAlgebraSpec, MatrixRep> build_algebra(const std::string& name);

/** Max-norm of the Jacobi combination; exactly 0 for a valid algebra. */
Rat jacobi_residual(const LieAlgebraSpec& spec);

/** Max-norm of [J^a,J^b] - f^{ab}_c J^c over all pairs. */
double rep_commutator_residual(const MatrixRep& rep);

/** t = sum_{ab} (kappa^{-1})_{ab} J^a (x) J^b on slots (1,2) of V (x) V. */
multitensor::SitedOperator casimir_tensor(const MatrixRep& rep);

/** Max-norm of [t, J^a (x) Id + Id (x) J^a] over a (ad-invariance). */
double casimir_invariance_residual(const MatrixRep& rep);

nlohmann::json to_json(const LieAlgebraSpec& spec);
LieAlgebraSpec algebra_from_json(const nlohmann::json& j);

/** Exact-rational algebra+rep bundle for the exact-arithmetic modules. */
struct RationalAlgebra {
  std::string name;
  int dim = 0;
  int d = 0;
  std::vector<Rat> f;  // as in LieAlgebraSpec
  RatMat killing;
  std::vector<RatMat> J;

  const Rat& fc(int a, int b, int c) const {
    return f[(static_cast<size_t>(a) * dim + b) * dim + c];
  }
};

/** Shipped exact algebras: "u1" (J = [1]) and "sl2" (defining rep). */
RationalAlgebra rational_algebra(const std::string& name);

}  // namespace pform::liealg
