#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pform::multitensor {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/** Default numerical tolerance for dense-operator identities. */
inline constexpr double kTol = 1e-12;

/**
 * Dense operator on a tensor product V_1 ⊗ ... ⊗ V_k that acts as the
 * identity outside a declared support.  Slots are 1-based; data is stored
 * row-major over the support slots in ascending slot order.
 */
struct SitedOperator {
  std::vector<int> slot_dims;  // dimension of every ambient slot
  std::vector<int> support;    // sorted 1-based slot indices
  Mat data;                    // square, size = product of supported dims

  int ambient_slots() const { return static_cast<int>(slot_dims.size()); }
  long support_dim() const;
  long ambient_dim() const;
  void validate() const;

  static SitedOperator identity(std::vector<int> slot_dims, std::vector<int> support);
  static SitedOperator on_slots(std::vector<int> slot_dims, std::vector<int> support, Mat m);
};

/**
 * Places `op` into a product of `total_slots` slots with dims `target_dims`;
 * `placement` maps each support slot of `op` to a distinct target slot.
 */
SitedOperator embed(const SitedOperator& op, int total_slots,
                    const std::map<int, int>& placement,
                    const std::vector<int>& target_dims);

/** Same ambient space, support widened to `new_support` (identity padding). */
SitedOperator promote(const SitedOperator& op, std::vector<int> new_support);

SitedOperator multiply(const SitedOperator& a, const SitedOperator& b);
SitedOperator add(const SitedOperator& a, const SitedOperator& b);
SitedOperator sub(const SitedOperator& a, const SitedOperator& b);
SitedOperator scale(const Cplx& c, const SitedOperator& a);
SitedOperator commutator(const SitedOperator& a, const SitedOperator& b);
SitedOperator dagger(const SitedOperator& a);
SitedOperator inverse(const SitedOperator& a);

/** Frobenius norm taken on the common support (identity slots excluded). */
double frobenius_norm(const SitedOperator& a);
double frobenius_distance(const SitedOperator& a, const SitedOperator& b);

/** Removes `slots` from the support by tracing them out. */
SitedOperator partial_trace(const SitedOperator& a, const std::vector<int>& slots);

/**
 * ‖Σ_i ops[i]‖_F over the full ambient space, evaluated through pairwise
 * Gram inner products so the ambient product is never materialised.
 */
double frobenius_norm_of_sum(std::span<const SitedOperator> ops);

/** Trace over the full ambient space (identity slots contribute factors d). */
Cplx ambient_trace(const SitedOperator& a);

/** Applies the operator to a dense ambient vector of length ambient_dim(). */
Eigen::VectorXcd apply(const SitedOperator& a, const Eigen::VectorXcd& v);

/** Dense matrix of the operator on the full ambient space. */
Mat ambient_matrix(const SitedOperator& a);

nlohmann::json to_json(const SitedOperator& a);
SitedOperator sited_from_json(const nlohmann::json& j);

}  // namespace pform::multitensor
