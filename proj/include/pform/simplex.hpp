#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include <json.hpp>

#include "pform/liealg.hpp"
#include "pform/multitensor.hpp"

namespace pform::simplex {

using multitensor::SitedOperator;

/** Spectral parameters (u_1,...,u_m); pairwise distinct when feeding trig_r. */
struct SpectralPoint {
  std::vector<double> u;
};

/** ‖R12 R13 R23 − R23 R13 R12‖_F on V⊗3; each Rij must be supported on {i,j}. */
double qybe_residual(const SitedOperator& r12, const SitedOperator& r13,
                     const SitedOperator& r23);

/** ‖[A12,A13] + [A12,A23] + [A13,A23]‖_F on V⊗3. */
double cybe_residual(const SitedOperator& a12, const SitedOperator& a13,
                     const SitedOperator& a23);

/** Classical r-matrix A(u,v) = t/(u−v) on slots (1,2); throws when u == v. */
SitedOperator trig_r(const liealg::MatrixRep& rep, double u, double v);

/** trig_r placed on slots (i,j) of a 3-slot product, all slot dims = rep.d. */
SitedOperator trig_r_on(const liealg::MatrixRep& rep, int i, int j, double ui, double uj,
                        int total_slots = 3);

/** Key for the tetrahedron family: a 3-subset {mu,nu,rho} of {1,2,3,4}, ascending. */
using Triple = std::array<int, 3>;

/**
 * Tetrahedron space: slots indexed by the pairs (12,13,14,23,24,34) in
 * lexicographic order; slot_of_pair maps a pair to its 1-based slot.
 */
int slot_of_pair(int mu, int nu);

/** The three slots {munu, murho, nurho} an A_{mu nu rho} must live on. */
std::vector<int> support_of_triple(const Triple& t);

/**
 * Frobenius norm of the six-term commutator sum
 * [A123,A124]+[A123,A134]+[A123,A234]+[A124,A134]+[A124,A234]+[A134,A234].
 */
double tetra_classical_residual(const std::map<Triple, SitedOperator>& a);

struct TetraAnsatzReport {
  std::map<Triple, SitedOperator> a;
  double residual_abs = 0;
  double residual_rel = 0;
  std::array<double, 6> pair_commutator_norms{};  // per-commutator diagnostics
};

/**
 * Assembles A_{mu nu rho} = B_{mu nu} + B_{mu rho} + B_{nu rho} with each
 * B placed on the single pair slot "mu nu", and measures the classical
 * tetrahedron residual.  The outcome is reported, not asserted.
 */
TetraAnsatzReport tetra_ansatz(
    const std::function<multitensor::Mat(int, int)>& pair_op, int pair_dim);

/** trig_r-backed pair family at the given 4-component spectral point. */
TetraAnsatzReport tetra_ansatz_trig(const liealg::MatrixRep& rep, const SpectralPoint& u);

nlohmann::json residual_report(const std::string& equation, double abs_residual,
                               double rel_residual, const nlohmann::json& params);

}  // namespace pform::simplex
