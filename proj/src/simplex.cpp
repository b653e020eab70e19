#include "pform/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pform::simplex {

using multitensor::Mat;
using multitensor::SitedOperator;

namespace {

void require_support(const SitedOperator& op, std::vector<int> slots, const char* what) {
  std::sort(slots.begin(), slots.end());
  for (int s : op.support)
    if (!std::binary_search(slots.begin(), slots.end(), s))
      throw std::invalid_argument(std::string(what) + ": operator supported outside its slots");
}

}  // namespace

double qybe_residual(const SitedOperator& r12, const SitedOperator& r13,
                     const SitedOperator& r23) {
  require_support(r12, {1, 2}, "qybe");
  require_support(r13, {1, 3}, "qybe");
  require_support(r23, {2, 3}, "qybe");
  auto lhs = multitensor::multiply(multitensor::multiply(r12, r13), r23);
  auto rhs = multitensor::multiply(multitensor::multiply(r23, r13), r12);
  return multitensor::frobenius_distance(lhs, rhs);
}

double cybe_residual(const SitedOperator& a12, const SitedOperator& a13,
                     const SitedOperator& a23) {
  require_support(a12, {1, 2}, "cybe");
  require_support(a13, {1, 3}, "cybe");
  require_support(a23, {2, 3}, "cybe");
  auto sum = multitensor::add(
      multitensor::add(multitensor::commutator(a12, a13), multitensor::commutator(a12, a23)),
      multitensor::commutator(a13, a23));
  return multitensor::frobenius_norm(sum);
}

SitedOperator trig_r(const liealg::MatrixRep& rep, double u, double v) {
  if (u == v) throw std::domain_error("trig_r: singular point u == v");
  return multitensor::scale(1.0 / (u - v), liealg::casimir_tensor(rep));
}

SitedOperator trig_r_on(const liealg::MatrixRep& rep, int i, int j, double ui, double uj,
                        int total_slots) {
  auto r = trig_r(rep, ui, uj);
  std::vector<int> dims(static_cast<size_t>(total_slots), rep.d);
  return multitensor::embed(r, total_slots, {{1, i}, {2, j}}, dims);
}

int slot_of_pair(int mu, int nu) {
  if (mu > nu) std::swap(mu, nu);
  static const std::map<std::pair<int, int>, int> idx = {
      {{1, 2}, 1}, {{1, 3}, 2}, {{1, 4}, 3}, {{2, 3}, 4}, {{2, 4}, 5}, {{3, 4}, 6}};
  auto it = idx.find({mu, nu});
  if (it == idx.end()) throw std::invalid_argument("slot_of_pair: indices must be in 1..4");
  return it->second;
}

std::vector<int> support_of_triple(const Triple& t) {
  std::vector<int> s = {slot_of_pair(t[0], t[1]), slot_of_pair(t[0], t[2]),
                        slot_of_pair(t[1], t[2])};
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

const std::array<Triple, 4> kTriples = {Triple{1, 2, 3}, Triple{1, 2, 4}, Triple{1, 3, 4},
                                        Triple{2, 3, 4}};

std::vector<SitedOperator> tetra_commutators(const std::map<Triple, SitedOperator>& a) {
  for (const auto& [t, op] : a) {
    auto sup = support_of_triple(t);
    require_support(op, sup, "tetra");
  }
  std::vector<SitedOperator> comms;
  for (size_t i = 0; i < kTriples.size(); ++i)
    for (size_t j = i + 1; j < kTriples.size(); ++j) {
      const auto& x = a.at(kTriples[i]);
      const auto& y = a.at(kTriples[j]);
      comms.push_back(multitensor::commutator(x, y));
    }
  return comms;
}

}  // namespace

double tetra_classical_residual(const std::map<Triple, SitedOperator>& a) {
  auto comms = tetra_commutators(a);
  // Dense embedding when the ambient space is small, Gram inner products otherwise.
  long ambient = comms.front().ambient_dim();
  if (ambient <= 1024) {
    SitedOperator acc = comms.front();
    for (size_t i = 1; i < comms.size(); ++i) acc = multitensor::add(acc, comms[i]);
    // Norm over the full ambient space: identity complement contributes nothing to a
    // commutator sum only if traceless; promote to the union support for correctness.
    std::vector<int> all;
    for (int s = 1; s <= acc.ambient_slots(); ++s) all.push_back(s);
    return multitensor::frobenius_norm(multitensor::promote(acc, all));
  }
  return multitensor::frobenius_norm_of_sum(comms);
}

TetraAnsatzReport tetra_ansatz(const std::function<Mat(int, int)>& pair_op, int pair_dim) {
  TetraAnsatzReport rep;
  std::vector<int> dims(6, pair_dim);
  auto b_on_slot = [&](int mu, int nu) {
    return SitedOperator::on_slots(dims, {slot_of_pair(mu, nu)}, pair_op(mu, nu));
  };
  for (const auto& t : kTriples) {
    auto op = multitensor::add(multitensor::add(b_on_slot(t[0], t[1]), b_on_slot(t[0], t[2])),
                               b_on_slot(t[1], t[2]));
    rep.a.emplace(t, std::move(op));
  }
  auto comms = tetra_commutators(rep.a);
  double scale = 0;
  for (size_t i = 0; i < comms.size(); ++i) {
    rep.pair_commutator_norms[i] = multitensor::frobenius_norm(comms[i]);
    scale += rep.pair_commutator_norms[i];
  }
  rep.residual_abs = multitensor::frobenius_norm_of_sum(comms);
  double opnorm = 0;
  for (const auto& [t, op] : rep.a) opnorm += multitensor::frobenius_norm(op);
  rep.residual_rel = opnorm > 0 ? rep.residual_abs / (opnorm * opnorm) : 0.0;
  (void)scale;
  return rep;
}

TetraAnsatzReport tetra_ansatz_trig(const liealg::MatrixRep& rep, const SpectralPoint& u) {
  if (u.u.size() != 4) throw std::invalid_argument("tetra_ansatz_trig: need 4 spectral values");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (u.u[i] == u.u[j]) throw std::domain_error("tetra_ansatz_trig: coincident parameters");
  auto pair_op = [&](int mu, int nu) {
    return trig_r(rep, u.u[static_cast<size_t>(mu) - 1], u.u[static_cast<size_t>(nu) - 1]).data;
  };
  return tetra_ansatz(pair_op, rep.d * rep.d);
}

nlohmann::json residual_report(const std::string& equation, double abs_residual,
                               double rel_residual, const nlohmann::json& params) {
  return {{"equation", equation},
          {"residual_abs", abs_residual},
          {"residual_rel", rel_residual},
          {"params", params}};
}

}  // namespace pform::simplex
