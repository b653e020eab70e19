#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "pform/lattice.hpp"

namespace pform::lattice {

namespace {

double wrap_angle(double t) { return std::remainder(t, 2 * M_PI); }

// U(1) 1-form: plaquette angle of plane (a<b) at x.
double plaq_angle(const LatticeGeometry& g, const std::vector<double>& th, long x, int a, int b) {
  auto link = [&](long s, int mu) { return th[static_cast<size_t>(s * g.n + mu)]; };
  return link(x, a) + link(g.shift(x, a, 1), b) - link(g.shift(x, b, 1), a) - link(x, b);
}

struct Form1Model {
  const LatticeGeometry& g;
  std::vector<double>& th;

  long nvars() const { return g.volume() * g.n; }
  long ncells() const { return g.volume() * g.planes(); }

  double cell_sum_cos() const {
    double s = 0;
    for (long x = 0; x < g.volume(); ++x)
      for (int p = 0; p < g.planes(); ++p) {
        auto [a, b] = g.plane_axes(p);
        s += std::cos(plaq_angle(g, th, x, a, b));
      }
    return s;
  }

  // Sum of cos over the plaquettes containing link (x, mu).
  double local_sum(long x, int mu) const {
    double s = 0;
    for (int nu = 0; nu < g.n; ++nu) {
      if (nu == mu) continue;
      int a = std::min(mu, nu), b = std::max(mu, nu);
      s += std::cos(plaq_angle(g, th, x, a, b));
      s += std::cos(plaq_angle(g, th, g.shift(x, nu, -1), a, b));
    }
    return s;
  }

  int colour_classes() const { return 2 * g.n; }
  int colour_of(long v) const {
    long x = v / g.n;
    int mu = static_cast<int>(v % g.n);
    auto c = g.site_coords(x);
    int par = std::accumulate(c.begin(), c.end(), 0) & 1;
    return mu * 2 + par;
  }
  double& value(long v) { return th[static_cast<size_t>(v)]; }
};

struct Form2Model {
  const LatticeGeometry& g;
  std::vector<double>& th;

  long nvars() const { return g.volume() * g.planes(); }
  long ncells() const {
    long c = 0;
    for (int mu = 0; mu < g.n; ++mu)
      for (int nu = mu + 1; nu < g.n; ++nu)
        for (int rho = nu + 1; rho < g.n; ++rho) ++c;
    return c * g.volume();
  }

  double cube_angle(long x, int mu, int nu, int rho) const {
    auto at = [&](long s, int p) { return th[static_cast<size_t>(s * g.planes() + p)]; };
    int pmn = g.plane_index(mu, nu), pmr = g.plane_index(mu, rho), pnr = g.plane_index(nu, rho);
    return at(g.shift(x, mu, 1), pnr) - at(x, pnr) - at(g.shift(x, nu, 1), pmr) + at(x, pmr) +
           at(g.shift(x, rho, 1), pmn) - at(x, pmn);
  }

  double cell_sum_cos() const {
    double s = 0;
    for (long x = 0; x < g.volume(); ++x)
      for (int mu = 0; mu < g.n; ++mu)
        for (int nu = mu + 1; nu < g.n; ++nu)
          for (int rho = nu + 1; rho < g.n; ++rho) s += std::cos(cube_angle(x, mu, nu, rho));
    return s;
  }

  // Sum of cos over the cubes containing plaquette (x, plane).
  double local_sum(long x, int plane) const {
    auto [a, b] = g.plane_axes(plane);
    double s = 0;
    for (int c = 0; c < g.n; ++c) {
      if (c == a || c == b) continue;
      int t[3] = {a, b, c};
      std::sort(t, t + 3);
      s += std::cos(cube_angle(x, t[0], t[1], t[2]));
      s += std::cos(cube_angle(g.shift(x, c, -1), t[0], t[1], t[2]));
    }
    return s;
  }

  int colour_classes() const { return 2 * g.planes(); }
  int colour_of(long v) const {
    long x = v / g.planes();
    int p = static_cast<int>(v % g.planes());
    auto c = g.site_coords(x);
    int par = std::accumulate(c.begin(), c.end(), 0) & 1;
    return p * 2 + par;
  }
  double& value(long v) { return th[static_cast<size_t>(v)]; }
};

template <class Model>
struct Sweeper {
  Model model;
  double beta;
  uint64_t seed;
  int threads;
  double width = 1.0;
  long accepted = 0, proposed = 0;
  std::vector<std::vector<long>> classes;

  Sweeper(Model m, double b, uint64_t s, int t) : model(std::move(m)), beta(b), seed(s), threads(t) {
    classes.resize(static_cast<size_t>(model.colour_classes()));
    for (long v = 0; v < model.nvars(); ++v)
      classes[static_cast<size_t>(model.colour_of(v))].push_back(v);
  }

  // Returns 1 on acceptance; safe to run concurrently within one colour class.
  long update_var(long v, uint64_t sweep) {
    long x;
    int local;
    if constexpr (std::is_same_v<Model, Form1Model>) {
      x = v / model.g.n;
      local = static_cast<int>(v % model.g.n);
    } else {
      x = v / model.g.planes();
      local = static_cast<int>(v % model.g.planes());
    }
    SplitMix rng(seed, static_cast<uint64_t>(v), sweep);
    double old = model.value(v);
    double before = model.local_sum(x, local);
    double prop = wrap_angle(old + rng.uniform(-width, width));
    model.value(v) = prop;
    double after = model.local_sum(x, local);
    double dS = -beta * (after - before);
    if (dS <= 0 || rng.uniform() < std::exp(-dS)) return 1;
    model.value(v) = old;
    return 0;
  }

  void sweep(uint64_t isweep) {
    for (const auto& cls : classes) {
      if (threads <= 1 || cls.size() < 64) {
        for (long v : cls) accepted += update_var(v, isweep);
      } else {
        std::vector<std::thread> pool;
        std::vector<long> acc_part(static_cast<size_t>(threads), 0);
        long chunk = (static_cast<long>(cls.size()) + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            long lo = t * chunk, hi = std::min<long>((t + 1) * chunk, static_cast<long>(cls.size()));
            long acc = 0;
            for (long i = lo; i < hi; ++i) acc += update_var(cls[static_cast<size_t>(i)], isweep);
            acc_part[static_cast<size_t>(t)] = acc;
          });
        }
        for (auto& th : pool) th.join();
        for (long a : acc_part) accepted += a;
      }
      proposed += static_cast<long>(cls.size());
    }
  }
};

template <class Model>
McResult run_chain(Model model, const McConfig& cfg) {
  Sweeper<Model> sw(std::move(model), cfg.beta, cfg.seed, cfg.threads);
  sw.width = M_PI / 2;
  McResult out;
  const long ncells = sw.model.ncells();
  long tune_acc = 0, tune_prop = 0;
  for (int s = 0; s < cfg.burnin; ++s) {
    long a0 = sw.accepted, p0 = sw.proposed;
    sw.sweep(static_cast<uint64_t>(s));
    tune_acc += sw.accepted - a0;
    tune_prop += sw.proposed - p0;
    if ((s + 1) % 20 == 0 && tune_prop > 0) {
      double r = static_cast<double>(tune_acc) / tune_prop;
      if (r > 0.55) sw.width = std::min(M_PI, sw.width * 1.25);
      if (r < 0.45) sw.width = std::max(1e-3, sw.width / 1.25);
      tune_acc = tune_prop = 0;
    }
  }
  sw.accepted = sw.proposed = 0;
  for (int s = 0; s < cfg.sweeps; ++s) {
    sw.sweep(static_cast<uint64_t>(cfg.burnin + s));
    double cells = sw.model.cell_sum_cos();
    out.action_history.push_back(-cfg.beta * cells);
    out.observable_history.push_back(cells / ncells);
  }
  out.acceptance = sw.proposed > 0 ? static_cast<double>(sw.accepted) / sw.proposed : 0.0;
  out.proposal_width = sw.width;

  const auto& h = out.observable_history;
  double mean = std::accumulate(h.begin(), h.end(), 0.0) / h.size();
  out.mean_observable = mean;
  // blocking estimate of the standard error
  int nblocks = std::min<int>(32, static_cast<int>(h.size()));
  long bsize = static_cast<long>(h.size()) / nblocks;
  std::vector<double> bm;
  for (int b = 0; b < nblocks; ++b) {
    double acc = 0;
    for (long i = b * bsize; i < (b + 1) * bsize; ++i) acc += h[static_cast<size_t>(i)];
    bm.push_back(acc / bsize);
  }
  double var = 0;
  for (double v : bm) var += (v - mean) * (v - mean);
  var /= bm.size() > 1 ? (bm.size() - 1) : 1;
  out.stderr_observable = std::sqrt(var / bm.size());
  return out;
}

}  // namespace

McResult mc_metropolis_abelian(const McConfig& cfg) {
  LatticeGeometry g;
  g.n = static_cast<int>(cfg.dims.size());
  g.L = cfg.dims;
  g.validate();
  if (cfg.form_degree != 1 && cfg.form_degree != 2)
    throw std::invalid_argument("form_degree must be 1 or 2");
  if (g.n < cfg.form_degree + 1)
    throw std::invalid_argument("lattice dimension too small for this form degree");
  if (cfg.sweeps < 1) throw std::invalid_argument("sweeps must be positive");

  McResult res;
  if (cfg.form_degree == 1) {
    std::vector<double> th(static_cast<size_t>(g.volume() * g.n), 0.0);
    res = run_chain(Form1Model{g, th}, cfg);
  } else {
    std::vector<double> th(static_cast<size_t>(g.volume() * g.planes()), 0.0);
    res = run_chain(Form2Model{g, th}, cfg);
  }
  if (!cfg.history_file.empty()) {
    std::ofstream f(cfg.history_file);
    if (!f) throw std::runtime_error("cannot open history file: " + cfg.history_file);
    f << "# sweep action mean_cos\n";
    for (size_t i = 0; i < res.action_history.size(); ++i)
      f << i << " " << res.action_history[i] << " " << res.observable_history[i] << "\n";
  }
  return res;
}

double plaquette_oracle(double beta, int grid) {
  double num = 0, den = 0;
  for (int i = 0; i < grid; ++i) {
    double t = 2 * M_PI * i / grid;
    double w = std::exp(beta * std::cos(t));
    num += std::cos(t) * w;
    den += w;
  }
  return num / den;
}

}  // namespace pform::lattice
