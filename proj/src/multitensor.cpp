#include "pform/multitensor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pform::multitensor {

namespace {

long dim_product(const std::vector<int>& dims, const std::vector<int>& slots) {
  long d = 1;
  for (int s : slots) d *= dims[static_cast<size_t>(s) - 1];
  return d;
}

// Multi-index walker over the given slot dims, row-major (first slot most significant).
struct MultiIndex {
  std::vector<int> dims;
  std::vector<int> idx;
  bool done = false;

  explicit MultiIndex(std::vector<int> d) : dims(std::move(d)), idx(dims.size(), 0) {
    for (int v : dims)
      if (v <= 0) throw std::invalid_argument("non-positive dimension");
  }
  long flat() const {
    long f = 0;
    for (size_t i = 0; i < dims.size(); ++i) f = f * dims[i] + idx[i];
    return f;
  }
  void next() {
    for (size_t i = dims.size(); i-- > 0;) {
      if (++idx[i] < dims[i]) return;
      idx[i] = 0;
    }
    done = true;
  }
};

}  // namespace

long SitedOperator::support_dim() const { return dim_product(slot_dims, support); }

long SitedOperator::ambient_dim() const {
  long d = 1;
  for (int v : slot_dims) d *= v;
  return d;
}

void SitedOperator::validate() const {
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    throw std::invalid_argument("support must be sorted and duplicate-free");
  for (int s : support)
    if (s < 1 || s > ambient_slots()) throw std::invalid_argument("support slot out of range");
  long d = support_dim();
  if (data.rows() != d || data.cols() != d)
    throw std::invalid_argument("data shape inconsistent with supported slot dims");
}

SitedOperator SitedOperator::identity(std::vector<int> slot_dims, std::vector<int> support) {
  SitedOperator op{std::move(slot_dims), std::move(support), {}};
  long d = op.support_dim();
  op.data = Mat::Identity(d, d);
  op.validate();
  return op;
}

SitedOperator SitedOperator::on_slots(std::vector<int> slot_dims, std::vector<int> support, Mat m) {
  SitedOperator op{std::move(slot_dims), std::move(support), std::move(m)};
  op.validate();
  return op;
}

SitedOperator embed(const SitedOperator& op, int total_slots,
                    const std::map<int, int>& placement,
                    const std::vector<int>& target_dims) {
  if (static_cast<int>(target_dims.size()) != total_slots)
    throw std::invalid_argument("target_dims size must equal total_slots");
  if (placement.size() != op.support.size())
    throw std::invalid_argument("placement must cover the support exactly");
  std::vector<int> image;
  for (int s : op.support) {
    auto it = placement.find(s);
    if (it == placement.end()) throw std::invalid_argument("placement missing a support slot");
    int t = it->second;
    if (t < 1 || t > total_slots) throw std::invalid_argument("placement target out of range");
    if (target_dims[static_cast<size_t>(t) - 1] != op.slot_dims[static_cast<size_t>(s) - 1])
      throw std::invalid_argument("slot dimension mismatch under placement");
    image.push_back(t);
  }
  std::vector<int> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("placement must be injective");

  // Leg permutation: position of each new-support slot in the old leg order.
  const size_t k = image.size();
  std::vector<int> perm(k);  // perm[new_pos] = old_pos
  for (size_t np = 0; np < k; ++np) {
    auto it = std::find(image.begin(), image.end(), sorted[np]);
    perm[np] = static_cast<int>(it - image.begin());
  }

  std::vector<int> old_dims, new_dims;
  for (int s : op.support) old_dims.push_back(op.slot_dims[static_cast<size_t>(s) - 1]);
  for (size_t np = 0; np < k; ++np) new_dims.push_back(old_dims[static_cast<size_t>(perm[np])]);

  long d = op.support_dim();
  Mat out = Mat::Zero(d, d);
  std::vector<int> old_row(k), old_col(k);
  for (MultiIndex r(new_dims); !r.done; r.next()) {
    for (size_t i = 0; i < k; ++i) old_row[static_cast<size_t>(perm[i])] = r.idx[i];
    long fr = 0;
    for (size_t i = 0; i < k; ++i) fr = fr * old_dims[i] + old_row[i];
    for (MultiIndex c(new_dims); !c.done; c.next()) {
      for (size_t i = 0; i < k; ++i) old_col[static_cast<size_t>(perm[i])] = c.idx[i];
      long fc = 0;
      for (size_t i = 0; i < k; ++i) fc = fc * old_dims[i] + old_col[i];
      out(r.flat(), c.flat()) = op.data(fr, fc);
    }
  }
  return SitedOperator::on_slots(target_dims, sorted, std::move(out));
}

SitedOperator promote(const SitedOperator& op, std::vector<int> new_support) {
  std::sort(new_support.begin(), new_support.end());
  if (!std::includes(new_support.begin(), new_support.end(), op.support.begin(), op.support.end()))
    throw std::invalid_argument("promote: new support must contain old support");
  if (new_support == op.support) return op;

  std::vector<int> new_dims;
  std::vector<int> pos_in_old(new_support.size(), -1);  // -1 => identity slot
  for (size_t i = 0; i < new_support.size(); ++i) {
    new_dims.push_back(op.slot_dims[static_cast<size_t>(new_support[i]) - 1]);
    auto it = std::find(op.support.begin(), op.support.end(), new_support[i]);
    if (it != op.support.end()) pos_in_old[i] = static_cast<int>(it - op.support.begin());
  }
  std::vector<int> old_dims;
  for (int s : op.support) old_dims.push_back(op.slot_dims[static_cast<size_t>(s) - 1]);

  long d = dim_product(op.slot_dims, new_support);
  Mat out = Mat::Zero(d, d);
  std::vector<int> orow(old_dims.size()), ocol(old_dims.size());
  for (MultiIndex r(new_dims); !r.done; r.next())
    for (MultiIndex c(new_dims); !c.done; c.next()) {
      bool diag = true;
      for (size_t i = 0; i < new_support.size(); ++i)
        if (pos_in_old[i] < 0 && r.idx[i] != c.idx[i]) { diag = false; break; }
      if (!diag) continue;
      for (size_t i = 0; i < new_support.size(); ++i)
        if (pos_in_old[i] >= 0) {
          orow[static_cast<size_t>(pos_in_old[i])] = r.idx[i];
          ocol[static_cast<size_t>(pos_in_old[i])] = c.idx[i];
        }
      long fr = 0, fc = 0;
      for (size_t i = 0; i < old_dims.size(); ++i) {
        fr = fr * old_dims[i] + orow[i];
        fc = fc * old_dims[i] + ocol[i];
      }
      out(r.flat(), c.flat()) = op.data(fr, fc);
    }
  return SitedOperator::on_slots(op.slot_dims, std::move(new_support), std::move(out));
}

namespace {

std::vector<int> support_union(const SitedOperator& a, const SitedOperator& b) {
  if (a.slot_dims != b.slot_dims) throw std::invalid_argument("ambient slot dims differ");
  std::vector<int> u;
  std::set_union(a.support.begin(), a.support.end(), b.support.begin(), b.support.end(),
                 std::back_inserter(u));
  return u;
}

}  // namespace

SitedOperator multiply(const SitedOperator& a, const SitedOperator& b) {
  auto u = support_union(a, b);
  SitedOperator pa = promote(a, u), pb = promote(b, u);
  pa.data = pa.data * pb.data;
  return pa;
}

SitedOperator add(const SitedOperator& a, const SitedOperator& b) {
  auto u = support_union(a, b);
  SitedOperator pa = promote(a, u), pb = promote(b, u);
  pa.data += pb.data;
  return pa;
}

SitedOperator sub(const SitedOperator& a, const SitedOperator& b) {
  auto u = support_union(a, b);
  SitedOperator pa = promote(a, u), pb = promote(b, u);
  pa.data -= pb.data;
  return pa;
}

SitedOperator scale(const Cplx& c, const SitedOperator& a) {
  SitedOperator out = a;
  out.data *= c;
  return out;
}

SitedOperator commutator(const SitedOperator& a, const SitedOperator& b) {
  auto u = support_union(a, b);
  SitedOperator pa = promote(a, u), pb = promote(b, u);
  Mat m = pa.data * pb.data - pb.data * pa.data;
  pa.data = std::move(m);
  return pa;
}

SitedOperator dagger(const SitedOperator& a) {
  SitedOperator out = a;
  out.data = a.data.adjoint();
  return out;
}

SitedOperator inverse(const SitedOperator& a) {
  SitedOperator out = a;
  Eigen::FullPivLU<Mat> lu(a.data);
  if (!lu.isInvertible()) throw std::domain_error("sited operator not invertible");
  out.data = lu.inverse();
  return out;
}

double frobenius_norm(const SitedOperator& a) { return a.data.norm(); }

double frobenius_distance(const SitedOperator& a, const SitedOperator& b) {
  return frobenius_norm(sub(a, b));
}

SitedOperator partial_trace(const SitedOperator& a, const std::vector<int>& slots) {
  std::vector<int> keep;
  for (int s : a.support)
    if (std::find(slots.begin(), slots.end(), s) == slots.end()) keep.push_back(s);
  for (int s : slots)
    if (std::find(a.support.begin(), a.support.end(), s) == a.support.end())
      throw std::invalid_argument("partial_trace: slot not in support");

  std::vector<int> old_dims, keep_pos, trace_pos;
  for (size_t i = 0; i < a.support.size(); ++i) {
    old_dims.push_back(a.slot_dims[static_cast<size_t>(a.support[i]) - 1]);
    if (std::find(slots.begin(), slots.end(), a.support[i]) == slots.end())
      keep_pos.push_back(static_cast<int>(i));
    else
      trace_pos.push_back(static_cast<int>(i));
  }
  std::vector<int> keep_dims, trace_dims;
  for (int p : keep_pos) keep_dims.push_back(old_dims[static_cast<size_t>(p)]);
  for (int p : trace_pos) trace_dims.push_back(old_dims[static_cast<size_t>(p)]);
  long dk = 1;
  for (int v : keep_dims) dk *= v;

  Mat out = Mat::Zero(dk, dk);
  std::vector<int> orow(old_dims.size()), ocol(old_dims.size());
  for (MultiIndex r(keep_dims.empty() ? std::vector<int>{1} : keep_dims); !r.done; r.next())
    for (MultiIndex c(keep_dims.empty() ? std::vector<int>{1} : keep_dims); !c.done; c.next()) {
      Cplx acc = 0;
      for (MultiIndex t(trace_dims.empty() ? std::vector<int>{1} : trace_dims); !t.done; t.next()) {
        if (!keep_dims.empty())
          for (size_t i = 0; i < keep_pos.size(); ++i) {
            orow[static_cast<size_t>(keep_pos[i])] = r.idx[i];
            ocol[static_cast<size_t>(keep_pos[i])] = c.idx[i];
          }
        if (!trace_dims.empty())
          for (size_t i = 0; i < trace_pos.size(); ++i) {
            orow[static_cast<size_t>(trace_pos[i])] = t.idx[i];
            ocol[static_cast<size_t>(trace_pos[i])] = t.idx[i];
          }
        long fr = 0, fc = 0;
        for (size_t i = 0; i < old_dims.size(); ++i) {
          fr = fr * old_dims[i] + orow[i];
          fc = fc * old_dims[i] + ocol[i];
        }
        acc += a.data(fr, fc);
      }
      long rr = keep_dims.empty() ? 0 : r.flat();
      long cc = keep_dims.empty() ? 0 : c.flat();
      out(rr, cc) += acc;
    }
  return SitedOperator::on_slots(a.slot_dims, keep, std::move(out));
}

namespace {

// <A, B> = tr(Â† B̂) over the ambient product, via partial traces.
Cplx gram_inner(const SitedOperator& a, const SitedOperator& b) {
  if (a.slot_dims != b.slot_dims) throw std::invalid_argument("ambient slot dims differ");
  std::vector<int> only_a, only_b, common;
  std::set_difference(a.support.begin(), a.support.end(), b.support.begin(), b.support.end(),
                      std::back_inserter(only_a));
  std::set_difference(b.support.begin(), b.support.end(), a.support.begin(), a.support.end(),
                      std::back_inserter(only_b));
  std::set_intersection(a.support.begin(), a.support.end(), b.support.begin(), b.support.end(),
                        std::back_inserter(common));
  double outside = 1;
  for (int s = 1; s <= a.ambient_slots(); ++s)
    if (!std::binary_search(a.support.begin(), a.support.end(), s) &&
        !std::binary_search(b.support.begin(), b.support.end(), s))
      outside *= a.slot_dims[static_cast<size_t>(s) - 1];
  SitedOperator ta = partial_trace(dagger(a), only_a);
  SitedOperator tb = partial_trace(b, only_b);
  // both now live on `common`
  return outside * (ta.data * tb.data).trace();
}

}  // namespace

double frobenius_norm_of_sum(std::span<const SitedOperator> ops) {
  Cplx acc = 0;
  for (const auto& x : ops)
    for (const auto& y : ops) acc += gram_inner(x, y);
  double v = acc.real();
  return v > 0 ? std::sqrt(v) : 0.0;
}

Cplx ambient_trace(const SitedOperator& a) {
  double outside = 1;
  for (int s = 1; s <= a.ambient_slots(); ++s)
    if (!std::binary_search(a.support.begin(), a.support.end(), s))
      outside *= a.slot_dims[static_cast<size_t>(s) - 1];
  return outside * a.data.trace();
}

Eigen::VectorXcd apply(const SitedOperator& a, const Eigen::VectorXcd& v) {
  if (v.size() != a.ambient_dim()) throw std::invalid_argument("vector length mismatch");
  SitedOperator full = promote(a, [&] {
    std::vector<int> all(a.slot_dims.size());
    std::iota(all.begin(), all.end(), 1);
    return all;
  }());
  return full.data * v;
}

Mat ambient_matrix(const SitedOperator& a) {
  std::vector<int> all(a.slot_dims.size());
  std::iota(all.begin(), all.end(), 1);
  return promote(a, all).data;
}

nlohmann::json to_json(const SitedOperator& a) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (long i = 0; i < a.data.rows(); ++i)
    for (long j = 0; j < a.data.cols(); ++j) {
      re.push_back(a.data(i, j).real());
      im.push_back(a.data(i, j).imag());
    }
  return {{"slot_dims", a.slot_dims}, {"support", a.support}, {"re", re}, {"im", im}};
}

SitedOperator sited_from_json(const nlohmann::json& j) {
  SitedOperator op;
  op.slot_dims = j.at("slot_dims").get<std::vector<int>>();
  op.support = j.at("support").get<std::vector<int>>();
  long d = op.support_dim();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<long>(re.size()) != d * d || static_cast<long>(im.size()) != d * d)
    throw std::invalid_argument("sited operator JSON: data size mismatch");
  op.data = Mat(d, d);
  for (long i = 0; i < d; ++i)
    for (long jj = 0; jj < d; ++jj)
      op.data(i, jj) = Cplx(re[static_cast<size_t>(i * d + jj)].get<double>(),
                            im[static_cast<size_t>(i * d + jj)].get<double>());
  op.validate();
  return op;
}

}  // namespace pform::multitensor
