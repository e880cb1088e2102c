#include "magnograph/gns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "magnograph/eigensolver.hpp"
#include "magnograph/error.hpp"

namespace magnograph {

using cd = std::complex<double>;
using Eigen::VectorXcd;
using Eigen::VectorXd;

GnsContext::GnsContext(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                       const HermitianSystem& sys)
    : g_(g), grid_(grid), sys_(sys), compact_(is_compact(g)) {
  wV_ = compact_ ? VectorXd::Zero(grid.dof_count) : VectorXd(grid.weights.cwiseProduct(pots.V));
}

double GnsContext::gradient_term(const VectorXcd& u) const {
  double q = sys_.quadratic(u);
  if (!compact_) q -= wV_.dot(u.cwiseAbs2());
  return std::max(q, 0.0);
}

double GnsContext::ratio_p(const VectorXcd& u, double p) const {
  const double P = std::pow(lp_norm(u, p, grid_.weights), p);
  const double G = std::sqrt(gradient_term(u));
  const double L2 = std::sqrt(sys_.mass(u));
  if (G == 0.0 || L2 == 0.0) return 0.0;
  return P / (std::pow(G, p / 2.0 - 1.0) * std::pow(L2, p / 2.0 + 1.0));
}

double GnsContext::ratio_inf(const VectorXcd& u) const {
  const double G = std::sqrt(gradient_term(u));
  const double L2 = std::sqrt(sys_.mass(u));
  if (G == 0.0 || L2 == 0.0) return 0.0;
  return sup_norm(u) / std::sqrt(G * L2);
}

// ---------------------------------------------------------------------------

ProbeGenerator::ProbeGenerator(const MetricGraph& g, const GraphGrid& grid, std::uint64_t seed)
    : g_(g), grid_(grid), rng_(seed) {}

std::vector<double> ProbeGenerator::vertex_distances(std::size_t source) const {
  const std::size_t nv = g_.vertices().size();
  std::vector<double> d(nv, std::numeric_limits<double>::infinity());
  std::vector<bool> done(nv, false);
  d[source] = 0.0;
  for (std::size_t round = 0; round < nv; ++round) {
    std::size_t best = nv;
    for (std::size_t v = 0; v < nv; ++v)
      if (!done[v] && (best == nv || d[v] < d[best])) best = v;
    if (best == nv || !std::isfinite(d[best])) break;
    done[best] = true;
    for (const Edge& e : g_.edges()) {
      if (!e.head) continue;
      const std::size_t a = *g_.vertex_index(e.tail), b = *g_.vertex_index(*e.head);
      if (a == best) d[b] = std::min(d[b], d[a] + e.length);
      if (b == best) d[a] = std::min(d[a], d[b] + e.length);
    }
  }
  return d;
}

VectorXcd ProbeGenerator::from_distances(const std::vector<double>& vd, std::size_t center_edge, double x0,
                                         double width) {
  std::uniform_int_distribution<int> shape_pick(0, 2);
  const int shape = shape_pick(rng_);
  auto profile = [&](double d) {
    const double t = d / width;
    switch (shape) {
      case 0: return std::exp(-0.5 * t * t);
      case 1: return 1.0 / std::cosh(t);
      default: return std::exp(-t);
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  return sample_function(grid_, [&](std::size_t k, double x) {
    const EdgeGrid& eg = grid_.edges[k];
    const Edge& e = g_.edges()[eg.edge_index];
    double d = vd[*g_.vertex_index(e.tail)] + x;
    if (e.head) d = std::min(d, vd[*g_.vertex_index(*e.head)] + eg.length - x);
    if (k == center_edge) d = std::min(d, std::abs(x - x0));
    return cd(d == inf ? 0.0 : profile(d), 0.0);
  });
}

VectorXcd ProbeGenerator::bump() {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double longest = 1.0;
  for (const EdgeGrid& e : grid_.edges) longest = std::max(longest, e.half_line ? 0.0 : e.length);
  const double lo = std::log(3.0 * grid_.target_h), hi = std::log(2.0 * longest);
  const double width = std::exp(lo + (hi - lo) * unif(rng_));

  const std::size_t nv = g_.vertices().size();
  if (unif(rng_) < 0.4) {
    const std::size_t v = std::min<std::size_t>(nv - 1, static_cast<std::size_t>(unif(rng_) * nv));
    return from_distances(vertex_distances(v), grid_.edges.size(), 0.0, width);
  }
  const std::size_t k = std::min(grid_.edges.size() - 1, static_cast<std::size_t>(unif(rng_) * grid_.edges.size()));
  const EdgeGrid& eg = grid_.edges[k];
  const Edge& e = g_.edges()[eg.edge_index];
  const double span = eg.half_line ? std::min(eg.length, 5.0 * longest) : eg.length;
  const double x0 = unif(rng_) * span;
  // distances from the point x0 reach the graph through the edge's endpoints
  std::vector<double> dt = vertex_distances(*g_.vertex_index(e.tail));
  std::vector<double> vd(nv);
  if (e.head) {
    std::vector<double> dh = vertex_distances(*g_.vertex_index(*e.head));
    for (std::size_t v = 0; v < nv; ++v) vd[v] = std::min(x0 + dt[v], eg.length - x0 + dh[v]);
  } else {
    for (std::size_t v = 0; v < nv; ++v) vd[v] = x0 + dt[v];
  }
  return from_distances(vd, k, x0, width);
}

VectorXcd ProbeGenerator::smooth() {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> modes(1, 6);
  VectorXcd vertex_value(static_cast<Eigen::Index>(g_.vertices().size()));
  for (Eigen::Index v = 0; v < vertex_value.size(); ++v) vertex_value[v] = cd(gauss(rng_), gauss(rng_));

  struct EdgeShape {
    std::vector<cd> c;
    double decay;
  };
  std::vector<EdgeShape> shapes;
  for (std::size_t k = 0; k < grid_.edges.size(); ++k) {
    EdgeShape s;
    const int m = modes(rng_);
    for (int j = 1; j <= m; ++j) s.c.push_back(cd(gauss(rng_), gauss(rng_)) / double(j));
    s.decay = 0.3 + 5.0 * unif(rng_);
    shapes.push_back(std::move(s));
  }
  return sample_function(grid_, [&](std::size_t k, double x) {
    const EdgeGrid& eg = grid_.edges[k];
    const Edge& e = g_.edges()[eg.edge_index];
    const EdgeShape& s = shapes[k];
    const cd a = vertex_value[static_cast<Eigen::Index>(*g_.vertex_index(e.tail))];
    cd val;
    if (e.head) {
      const cd b = vertex_value[static_cast<Eigen::Index>(*g_.vertex_index(*e.head))];
      val = a + (b - a) * (x / eg.length);
    } else {
      val = a * std::exp(-x / s.decay);
    }
    const double L = eg.half_line ? std::min(eg.length, 6.0 * s.decay) : eg.length;
    if (x <= L)
      for (std::size_t j = 0; j < s.c.size(); ++j) val += s.c[j] * std::sin((j + 1) * M_PI * x / L);
    return val;
  });
}

VectorXcd ProbeGenerator::combination(const Eigen::MatrixXcd& basis) {
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> count(1, std::min<int>(3, static_cast<int>(basis.cols())));
  std::uniform_int_distribution<int> col(0, static_cast<int>(basis.cols()) - 1);
  VectorXcd u = VectorXcd::Zero(basis.rows());
  const int c = count(rng_);
  for (int i = 0; i < c; ++i) u += cd(gauss(rng_), gauss(rng_)) * basis.col(col(rng_));
  return u;
}

VectorXcd ProbeGenerator::next() {
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  VectorXcd u = (counter_++ % 3 == 1) ? bump() : smooth();
  return u * std::polar(1.0, unif(rng_));
}

// ---------------------------------------------------------------------------

namespace {

// Preconditioned ascent on log of a scale-invariant ratio. `dual_grad` returns
// the dual gradient of the log-ratio at u.
template <class F, class G>
VectorXcd ascend(VectorXcd u, const HermitianSystem& sys, const Eigen::SimplicialLDLT<SparseMatrixC>& pre,
                 const F& log_ratio, const G& dual_grad, int max_iter) {
  u /= std::sqrt(sys.mass(u));
  double f = log_ratio(u);
  double t = 0.0;
  int quiet = 0;
  for (int it = 0; it < max_iter && quiet < 8; ++it) {
    VectorXcd d = pre.solve(dual_grad(u));
    const double dn = std::sqrt(sys.mass(d));
    if (!(dn > 0.0)) break;
    if (t == 0.0) t = 0.1 / dn;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      VectorXcd trial = u + t * d;
      const double m = sys.mass(trial);
      if (m > 0.0) {
        trial /= std::sqrt(m);
        const double ft = log_ratio(trial);
        if (ft > f) {
          quiet = (ft - f) < 1e-12 * std::max(1.0, std::abs(f)) ? quiet + 1 : 0;
          u = trial;
          f = ft;
          accepted = true;
          t *= 2.0;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return u;
}

struct Ranked {
  double ratio;
  VectorXcd u;
  std::string family;
};

void keep_top(std::vector<Ranked>& top, double ratio, const VectorXcd& u, const char* family, std::size_t n) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return;
  if (top.size() < n || ratio > top.back().ratio) {
    top.push_back({ratio, u, family});
    std::sort(top.begin(), top.end(), [](const Ranked& a, const Ranked& b) { return a.ratio > b.ratio; });
    if (top.size() > n) top.pop_back();
  }
}

}  // namespace

GnsConstants estimate_gns_constants(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                                    const HermitianSystem& sys, double p, int probes, std::uint64_t seed) {
  if (probes < 100) throw ValidationError("GNS estimation needs at least 100 probes");
  if (!(p >= 2.0)) throw ValidationError("GNS exponent must be at least 2");
  GnsContext ctx(g, grid, pots, sys);
  ProbeGenerator gen(g, grid, seed);

  const int n_eig = std::min(12, sys.dof_count);
  Spectrum spec = eigenpairs(sys, n_eig);

  constexpr std::size_t kTop = 4;
  std::vector<Ranked> top_p, top_inf;
  int count_smooth = 0, count_bump = 0, count_eigen = 0;
  for (int i = 0; i < probes; ++i) {
    VectorXcd u;
    const char* family;
    if (i < n_eig) {
      u = spec.vectors.col(i);
      family = "eigen";
      ++count_eigen;
    } else if (i % 10 == 0) {
      u = gen.combination(spec.vectors);
      family = "eigen";
      ++count_eigen;
    } else if (i % 2 == 0) {
      u = gen.bump();
      family = "bump";
      ++count_bump;
    } else {
      u = gen.smooth();
      family = "smooth";
      ++count_smooth;
    }
    keep_top(top_p, ctx.ratio_p(u, p), u, family, kTop);
    keep_top(top_inf, ctx.ratio_inf(u), u, family, kTop);
  }

  Eigen::SimplicialLDLT<SparseMatrixC> pre(sys.S);
  if (pre.info() != Eigen::Success) throw ConvergenceError("factorization for GNS refinement failed");
  const VectorXd& w = grid.weights;
  VectorXd wV = ctx.compact() ? VectorXd::Zero(sys.dof_count) : VectorXd(grid.weights.cwiseProduct(pots.V));
  auto grad_op = [&](const VectorXcd& u) -> VectorXcd { return sys.S * u - wV.cwiseProduct(u); };

  const double a = (p / 2.0 - 1.0) / 2.0, b = (p / 2.0 + 1.0) / 2.0;
  auto logr_p = [&](const VectorXcd& u) { return std::log(ctx.ratio_p(u, p)); };
  auto grad_p = [&](const VectorXcd& u) -> VectorXcd {
    VectorXcd N(u.size());
    double P = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const double m = std::abs(u[j]);
      N[j] = m == 0.0 ? cd(0.0) : w[j] * std::pow(m, p - 2.0) * u[j];
      P += w[j] * std::pow(m, p);
    }
    return p / P * N - 2.0 * a / ctx.gradient_term(u) * grad_op(u) -
           2.0 * b / sys.mass(u) * sys.mass_diagonal.cwiseProduct(u);
  };
  auto logr_inf = [&](const VectorXcd& u) { return std::log(ctx.ratio_inf(u)); };
  auto grad_inf = [&](const VectorXcd& u) -> VectorXcd {
    Eigen::Index j;
    u.cwiseAbs().maxCoeff(&j);
    VectorXcd gvec = -0.5 / ctx.gradient_term(u) * grad_op(u) - 0.5 / sys.mass(u) * sys.mass_diagonal.cwiseProduct(u);
    gvec[j] += u[j] / std::norm(u[j]);
    return gvec;
  };

  GnsConstants out;
  out.p = p;
  out.probes = probes;
  out.compact = ctx.compact();
  std::string best_p_family = top_p.empty() ? "none" : top_p.front().family;
  std::string best_inf_family = top_inf.empty() ? "none" : top_inf.front().family;
  for (const Ranked& r : top_p) {
    out.raw_C_p = std::max(out.raw_C_p, r.ratio);
    const double refined = ctx.ratio_p(ascend(r.u, sys, pre, logr_p, grad_p, 400), p);
    if (refined > out.raw_C_p) {
      out.raw_C_p = refined;
      best_p_family = r.family + "+ascent";
    }
  }
  for (const Ranked& r : top_inf) {
    out.raw_C_inf = std::max(out.raw_C_inf, r.ratio);
    const double refined = ctx.ratio_inf(ascend(r.u, sys, pre, logr_inf, grad_inf, 400));
    if (refined > out.raw_C_inf) {
      out.raw_C_inf = refined;
      best_inf_family = r.family + "+ascent";
    }
  }
  out.C_p = kGnsSafety * out.raw_C_p;
  out.C_inf = kGnsSafety * out.raw_C_inf;

  std::ostringstream prov;
  prov << "empirical sup over " << probes << " probes (smooth " << count_smooth << ", bump " << count_bump
       << ", eigen " << count_eigen << "), top " << kTop << " refined by ascent, safety " << kGnsSafety
       << ", argmax " << best_p_family << '/' << best_inf_family << ", gradient term "
       << (ctx.compact() ? "||u||" : "||D_A u||_2");
  out.provenance = prov.str();
  return out;
}

// ---------------------------------------------------------------------------

PerturbedNormBound perturbed_norm_bound(double q, double Vq_norm, double C_pprime) {
  if (!(q >= 1.0)) throw ValidationError("q must be at least 1");
  if (!(Vq_norm >= 0.0)) throw ValidationError("||V_q||_q must be nonnegative");
  PerturbedNormBound b;
  b.q = q;
  b.Vq_norm = Vq_norm;
  if (std::isinf(q)) {
    b.bounded_case = true;
    b.nu_min = Vq_norm;
    return b;
  }
  const double K = q == 1.0 ? C_pprime * C_pprime : std::pow(C_pprime, (q - 1.0) / q);
  const double e = 2.0 * q / (2.0 * q - 1.0);
  b.C_half = std::pow(q, -1.0 / (2.0 * q - 1.0)) * ((2.0 * q - 1.0) / (2.0 * q)) * std::pow(K, e);
  b.nu_min = 1.0 + b.C_half * std::pow(Vq_norm, e);
  return b;
}

double potential_lq_norm(const VectorXd& Vq, double q, const GraphGrid& grid) {
  if (std::isinf(q)) return Vq.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index j = 0; j < Vq.size(); ++j) s += grid.weights[j] * std::pow(std::abs(Vq[j]), q);
  return std::pow(s, 1.0 / q);
}

double perturbed_quadratic(const HermitianSystem& sys, const VectorXcd& u, const VectorXd& Vq, double nu) {
  const VectorXd a2 = u.cwiseAbs2();
  return sys.quadratic(u) + sys.mass_diagonal.cwiseProduct(Vq).dot(a2) + nu * sys.mass_diagonal.dot(a2);
}

}  // namespace magnograph
