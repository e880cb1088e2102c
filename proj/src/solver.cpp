#include "magnograph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "magnograph/error.hpp"
#include "magnograph/residuals.hpp"

namespace magnograph {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using SparseMatrixR = Eigen::SparseMatrix<double>;

void SolverConfig::validate() const {
  if (r_schedule.empty()) throw ValidationError("r schedule is empty");
  for (std::size_t i = 0; i < r_schedule.size(); ++i) {
    if (!(r_schedule[i] > 1.0)) throw ValidationError("r schedule entries must exceed 1");
    if (i > 0 && !(r_schedule[i] > r_schedule[i - 1])) throw ValidationError("r schedule must be strictly increasing");
  }
  if (!(grad_tol > 0.0) || !(mass_tol > 0.0)) throw ValidationError("tolerances must be positive");
}

std::string to_string(Dichotomy d) {
  switch (d) {
    case Dichotomy::MassReached: return "MassReached";
    case Dichotomy::MassStagnated: return "MassStagnated";
    case Dichotomy::Unconstrained: return "Unconstrained";
  }
  return "?";
}

Problem make_problem(const MetricGraph& g, const GraphGrid& grid, const PotentialPair& pots,
                     const HermitianSystem& sys, double p, double mu) {
  Problem prob;
  prob.graph = &g;
  prob.grid = &grid;
  prob.pots = &pots;
  prob.sys = &sys;
  prob.region_mask = nonlinearity_mask(g, grid);
  prob.params = make_energy_params(g, grid, p, mu);
  return prob;
}

void finalize(const Problem& prob, CriticalPoint& cp) {
  EnergyParams plain = prob.params;
  plain.r.reset();
  const EnergyReport rep = energy(*prob.sys, cp.u, plain);
  cp.energy = rep.total;
  cp.mass = rep.mass;
  cp.weak_residual = weak_residual(*prob.sys, cp.u, cp.lambda, plain.p, plain.psi_weights);
  const StrongResidual sr =
      strong_residual(*prob.graph, *prob.grid, *prob.pots, cp.u, cp.lambda, plain.p, prob.region_mask);
  cp.strong_residual = sr.interior_max;
  cp.vertex_residuals = sr.vertex;
  cp.vertex_residual = sr.vertex_max;
}

double orbit_distance(const VectorXcd& u, const VectorXcd& w, const VectorXd& m) {
  const double uu = m.dot(u.cwiseAbs2()), ww = m.dot(w.cwiseAbs2());
  const cd c = w.dot(m.cwiseProduct(u));
  return std::sqrt(std::max(0.0, uu + ww - 2.0 * std::abs(c)));
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

VectorXcd random_field(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = cd(gauss(rng), gauss(rng));
  return x;
}

void rescale_to(VectorXcd& u, const VectorXd& m, double target) {
  const double mass = m.dot(u.cwiseAbs2());
  if (!(mass > 0.0)) throw ConvergenceError("cannot rescale a zero field");
  u *= std::sqrt(target / mass);
}

// ---------------------------------------------------------------------------
// Real-ified Newton on (u, lambda). Unknown z = [Re u_0, Im u_0, ..., lambda].
// Equations: Su - N(u) - lambda M u = 0 (with the Im row at the anchor dof
// replaced by Im u_a = 0) and one scalar equation closing the system:
//   penalized:   lambda - (2/mu) f_r'(mass/mu) = 0
//   constrained: (mass - mu)/mu = 0

struct NewtonMode {
  bool constrained = false;
  double r = 2.0;
};

struct NewtonOutcome {
  VectorXcd u;
  double lambda = 0.0;
  int iterations = 0;
};

class NewtonSolver {
 public:
  NewtonSolver(const Problem& prob, const SolverConfig& cfg, NewtonMode mode, const std::vector<VectorXcd>& known)
      : prob_(prob), cfg_(cfg), mode_(mode), known_(known), n_(prob.sys->dof_count),
        m_(prob.sys->mass_diagonal), W_(prob.params.psi_weights), p_(prob.params.p), mu_(prob.params.mu) {
    const SparseMatrixC& S = prob.sys->S;
    for (int k = 0; k < S.outerSize(); ++k) {
      for (SparseMatrixC::InnerIterator it(S, k); it; ++it) {
        const int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
        const double sr = it.value().real(), si = it.value().imag();
        s_trip_.emplace_back(2 * i, 2 * j, sr);
        s_trip_.emplace_back(2 * i + 1, 2 * j + 1, sr);
        if (si != 0.0) {
          s_trip_.emplace_back(2 * i, 2 * j + 1, -si);
          s_trip_.emplace_back(2 * i + 1, 2 * j, si);
        }
      }
    }
  }

  NewtonOutcome solve(VectorXcd u, double lambda) {
    if (!(mass(u) > 0.0)) throw ConvergenceError("seed is zero: the trivial critical point is excluded");
    choose_anchor(u);
    NewtonOutcome out;
    for (int it = 0; it <= cfg_.max_iter; ++it) {
      if (mass(u) < 1e-14 * mu_) throw ConvergenceError("iteration collapsed to the trivial point");
      VectorXd F = residual(u, lambda);
      if (converged(u, lambda, F)) {
        present(u);
        out.u = u;
        out.lambda = lambda;
        out.iterations = it;
        return out;
      }
      if (it == cfg_.max_iter) break;

      VectorXd delta = newton_step(u, lambda, F);

      double defl = 1.0;
      if (!known_.empty()) {
        double mval;
        VectorXcd grad = deflation_gradient(u, mval);
        double dir = 0.0;
        for (int j = 0; j < n_; ++j) dir += (std::conj(grad[j]) * cd(delta[2 * j], delta[2 * j + 1])).real();
        const double tau = dir / mval;
        defl = 1.0 / (1.0 - tau);
        if (!std::isfinite(defl) || defl <= 0.0) defl = 1.0;
      }
      delta *= defl;

      const double merit0 = merit(u, F);
      double t = 1.0;
      bool accepted = false, hit_boundary = false;
      for (int bt = 0; bt < cfg_.max_backtracks; ++bt, t *= 0.5) {
        VectorXcd ut = u;
        for (int j = 0; j < n_; ++j) ut[j] += t * cd(delta[2 * j], delta[2 * j + 1]);
        const double lt = lambda + t * delta[2 * n_];
        if (!mode_.constrained && mass(ut) >= mu_) {
          hit_boundary = true;
          continue;
        }
        const double mt = merit(ut, residual(ut, lt));
        if (std::isfinite(mt) && mt <= (1.0 - cfg_.armijo * t) * merit0) {
          u = ut;
          lambda = lt;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (hit_boundary) throw LeftUMu("Newton steps keep leaving U_mu");
        throw ConvergenceError("line search failed (weak residual " + sci(weak(u, lambda)) + ")");
      }
    }
    throw ConvergenceError("Newton did not converge in " + std::to_string(cfg_.max_iter) + " iterations");
  }

 private:
  double mass(const VectorXcd& u) const { return m_.dot(u.cwiseAbs2()); }

  // The pinned dof must carry a good share of the field or the anchored
  // system goes ill-conditioned; a weak requested anchor is honoured only by
  // the final rotation in present().
  void choose_anchor(VectorXcd& u) {
    Eigen::Index a = cfg_.phase_anchor;
    if (a < 0 || a >= n_ || std::abs(u[a]) < 0.1 * u.cwiseAbs().maxCoeff()) u.cwiseAbs().maxCoeff(&a);
    anchor_ = static_cast<int>(a);
    u *= std::conj(u[a]) / std::abs(u[a]);
    u[a] = cd(u[a].real(), 0.0);
  }

  void present(VectorXcd& u) const {
    const Eigen::Index a = cfg_.phase_anchor;
    if (a < 0 || a >= n_ || std::abs(u[a]) == 0.0) return;
    u *= std::conj(u[a]) / std::abs(u[a]);
    u[a] = cd(u[a].real(), 0.0);
  }

  VectorXcd g(const VectorXcd& u, double lambda) const {
    return prob_.sys->S * u - nonlinear_load(u, p_, W_) - lambda * m_.cwiseProduct(u);
  }

  double scalar_eq(const VectorXcd& u, double lambda) const {
    const double s = mass(u) / mu_;
    if (mode_.constrained) return s - 1.0;
    return lambda - 2.0 / mu_ * f_r_prime(s, mode_.r);
  }

  VectorXd residual(const VectorXcd& u, double lambda) const {
    VectorXcd gv = g(u, lambda);
    VectorXd F(2 * n_ + 1);
    for (int j = 0; j < n_; ++j) {
      F[2 * j] = gv[j].real();
      F[2 * j + 1] = gv[j].imag();
    }
    F[2 * anchor_ + 1] = u[anchor_].imag();
    F[2 * n_] = scalar_eq(u, lambda);
    return F;
  }

  double deflation_factor(const VectorXcd& u) const {
    double mval = 1.0;
    for (const VectorXcd& k : known_) {
      const double d = orbit_distance(u, k, m_);
      mval *= 1.0 + cfg_.deflation_shift * mu_ / (d * d);
    }
    return mval;
  }

  // Complex representation of grad m: d m[v] = Re sum conj(grad_j) v_j.
  VectorXcd deflation_gradient(const VectorXcd& u, double& mval) const {
    mval = deflation_factor(u);
    VectorXcd grad = VectorXcd::Zero(n_);
    for (const VectorXcd& k : known_) {
      const cd c = k.dot(m_.cwiseProduct(u));
      const cd rot = std::abs(c) > 0 ? c / std::abs(c) : cd(1.0);
      const double d2 = std::pow(orbit_distance(u, k, m_), 2);
      const double mi = 1.0 + cfg_.deflation_shift * mu_ / d2;
      const VectorXcd dd2 = 2.0 * m_.cwiseProduct(u - rot * k);
      grad += (-cfg_.deflation_shift * mu_ / (d2 * d2) / mi) * dd2;
    }
    return mval * grad;
  }

  double merit(const VectorXcd& u, const VectorXd& F) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double a = F[2 * j], b = j == anchor_ ? F[2 * j + 1] * m_[j] : F[2 * j + 1];
      s += (a * a + b * b) / m_[j];
    }
    s += F[2 * n_] * F[2 * n_] * mu_;
    const double scale = known_.empty() ? 1.0 : deflation_factor(u);
    return s * scale * scale;
  }

  double weak(const VectorXcd& u, double lambda) const {
    return dual_norm(g(u, lambda), m_) / std::sqrt(mass(u));
  }

  bool converged(const VectorXcd& u, double lambda, const VectorXd& F) const {
    if (weak(u, lambda) > cfg_.grad_tol) return false;
    const double c = F[2 * n_];
    if (mode_.constrained) return std::abs(c) <= 1e-12;
    // the penalty equation inherits the rounding of the mass amplified by f_r''
    const double s = mass(u) / mu_;
    const double ctol = 1e-12 * std::max(1.0, std::abs(lambda)) + 1e-13 * 2.0 / mu_ * f_r_second(s, mode_.r) * s;
    return std::abs(c) <= ctol;
  }

  // Newton step for the bordered system [A b; c^T d] [du; dl] = -[F_u; F_l]
  // by block elimination: A is the real-ified Hessian block (sparse), b the
  // lambda column -Mu, c the gradient of the scalar equation.
  VectorXd newton_step(const VectorXcd& u, double lambda, const VectorXd& F) {
    SparseMatrixR A = hessian_block(u, lambda);
    if (!lu_analyzed_) {
      lu_.analyzePattern(A);
      lu_analyzed_ = true;
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success) throw ConvergenceError("singular Newton matrix");
    const int N = 2 * n_;
    VectorXd b = VectorXd::Zero(N), c = VectorXd::Zero(N);
    const double s = mass(u) / mu_;
    const double coef = mode_.constrained ? 1.0 / mu_ : -2.0 / mu_ * f_r_second(s, mode_.r) / mu_;
    for (int j = 0; j < n_; ++j) {
      b[2 * j] = -m_[j] * u[j].real();
      if (j != anchor_) b[2 * j + 1] = -m_[j] * u[j].imag();
      c[2 * j] = coef * 2.0 * m_[j] * u[j].real();
      c[2 * j + 1] = coef * 2.0 * m_[j] * u[j].imag();
    }
    const double d = mode_.constrained ? 0.0 : 1.0;
    const VectorXd x1 = lu_.solve(-F.head(N));
    const VectorXd x2 = lu_.solve(b);
    const double schur = d - c.dot(x2);
    if (!std::isfinite(schur) || schur == 0.0) throw ConvergenceError("singular bordered Newton system");
    const double dl = (-F[N] - c.dot(x1)) / schur;
    VectorXd delta(N + 1);
    delta.head(N) = x1 - dl * x2;
    delta[N] = dl;
    if (!delta.allFinite()) throw ConvergenceError("Newton solve failed");
    return delta;
  }

  SparseMatrixR hessian_block(const VectorXcd& u, double lambda) const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(s_trip_.size() + 4 * static_cast<std::size_t>(n_) + 1);
    for (const auto& e : s_trip_) {
      if (e.row() == 2 * anchor_ + 1) continue;
      t.push_back(e);
    }
    for (int j = 0; j < n_; ++j) {
      const double x = u[j].real(), y = u[j].imag();
      const double rho = x * x + y * y;
      double a11 = -lambda * m_[j], a12 = 0.0, a22 = -lambda * m_[j];
      if (W_[j] != 0.0 && rho > 0.0) {
        const double f = W_[j] * std::pow(rho, (p_ - 2.0) / 2.0);
        const double c = (p_ - 2.0) * f / rho;
        a11 -= f + c * x * x;
        a12 -= c * x * y;
        a22 -= f + c * y * y;
      }
      t.emplace_back(2 * j, 2 * j, a11);
      t.emplace_back(2 * j, 2 * j + 1, a12);
      if (j != anchor_) {
        t.emplace_back(2 * j + 1, 2 * j, a12);
        t.emplace_back(2 * j + 1, 2 * j + 1, a22);
      }
    }
    t.emplace_back(2 * anchor_ + 1, 2 * anchor_ + 1, 1.0);
    SparseMatrixR A(2 * n_, 2 * n_);
    A.setFromTriplets(t.begin(), t.end());
    return A;
  }

  const Problem& prob_;
  const SolverConfig& cfg_;
  NewtonMode mode_;
  const std::vector<VectorXcd>& known_;
  int n_;
  const VectorXd& m_;
  const VectorXd& W_;
  double p_, mu_;
  int anchor_ = 0;
  std::vector<Eigen::Triplet<double>> s_trip_;
  Eigen::SparseLU<SparseMatrixR> lu_;
  bool lu_analyzed_ = false;
};

// Smallest s in (0,1) with (2/mu) f_r'(s) = lambda; lambda > 0.
double mass_fraction_for_multiplier(double lambda, double mu, double r) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid >= 1.0 || mid == lo || mid == hi) break;
    (2.0 / mu * f_r_prime(mid, r) < lambda ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------

CriticalPoint minimize_rayleigh(const HermitianSystem& sys, double mu, const SolverConfig& cfg) {
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  const int n = sys.dof_count;
  const VectorXd& m = sys.mass_diagonal;
  Eigen::SimplicialLDLT<SparseMatrixC> pre(sys.S);
  if (pre.info() != Eigen::Success) throw ConvergenceError("factorization failed");
  auto mdot = [&](const VectorXcd& a, const VectorXcd& b) { return a.dot(m.cwiseProduct(b)); };

  VectorXcd x = random_field(n, cfg.seed);
  x /= std::sqrt(mdot(x, x).real());
  VectorXcd dir = VectorXcd::Zero(n);
  double lambda = 0.0, res = 0.0;
  for (int it = 0; it < cfg.pg_max_iter; ++it) {
    lambda = sys.quadratic(x);
    const VectorXcd r = sys.S * x - lambda * m.cwiseProduct(x);
    res = dual_norm(r, m);
    if (res <= cfg.grad_tol * std::max(1.0, lambda)) {
      CriticalPoint cp;
      cp.u = x * std::sqrt(mu);
      cp.lambda = lambda;
      cp.mass = mu;
      cp.energy = 0.5 * mu * lambda;
      cp.weak_residual = res / std::max(1.0, lambda);
      cp.branch = "linear-ground";
      return cp;
    }
    std::vector<VectorXcd> cols{x, pre.solve(r)};
    if (it > 0) cols.push_back(dir);
    // M-orthonormal basis of span{x, S^-1 r, previous direction}
    std::vector<VectorXcd> q;
    for (VectorXcd v : cols) {
      const double n0 = std::sqrt(mdot(v, v).real());
      for (int pass = 0; pass < 2; ++pass)
        for (const VectorXcd& b : q) v -= b * mdot(b, v);
      const double n1 = std::sqrt(mdot(v, v).real());
      if (n1 > 1e-12 * n0) q.push_back(v / n1);
    }
    MatrixXcd Z(n, static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) Z.col(static_cast<Eigen::Index>(i)) = q[i];
    MatrixXcd H = Z.adjoint() * (sys.S * Z);
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    const VectorXcd c = es.eigenvectors().col(0);
    const VectorXcd xn = Z * c;
    dir = xn - Z.col(0) * c[0];
    x = xn / std::sqrt(mdot(xn, xn).real());
  }
  throw ConvergenceError("Rayleigh minimization did not converge (residual " + sci(res) + ")");
}

CriticalPoint projected_gradient(const VectorXcd& u0, const Problem& prob, const SolverConfig& cfg) {
  const HermitianSystem& sys = *prob.sys;
  const VectorXd& m = sys.mass_diagonal;
  const VectorXd& W = prob.params.psi_weights;
  const double mu = prob.params.mu, p = prob.params.p;
  Eigen::SimplicialLDLT<SparseMatrixC> pre(sys.S);
  if (pre.info() != Eigen::Success) throw ConvergenceError("factorization failed");

  VectorXcd u = u0;
  rescale_to(u, m, mu);
  double e = 0.5 * sys.quadratic(u) - psi(u, p, W);

  // E(R(u + t d)) - E(u) with R the rescaling to mass mu. Differencing two
  // energies loses about eps * cond(S, M) relative accuracy, far more than the
  // decrease near convergence, so the difference is expanded instead.
  auto energy_change = [&](const VectorXcd& Su, const VectorXcd& d, const VectorXcd& Sd, double t, VectorXcd& ut) {
    const double dm = 2.0 * t * u.dot(m.cwiseProduct(d)).real() + t * t * m.dot(d.cwiseAbs2());
    const double a2 = mu / (mu + dm);
    const double dq = (a2 - 1.0) * u.dot(Su).real() + a2 * (2.0 * t * d.dot(Su).real() + t * t * d.dot(Sd).real());
    ut = std::sqrt(a2) * (u + t * d);
    double dpsi = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      if (W[j] == 0.0) continue;
      dpsi += W[j] * (std::pow(std::abs(ut[j]), p) - std::pow(std::abs(u[j]), p));
    }
    return 0.5 * dq - dpsi / p;
  };

  double t = 1.0;
  for (int it = 0; it < cfg.pg_max_iter; ++it) {
    const VectorXcd Su = sys.S * u;
    const VectorXcd free = Su - nonlinear_load(u, p, W);
    const double lambda = u.dot(free).real() / mu;
    const VectorXcd gvec = free - lambda * m.cwiseProduct(u);
    const double res = dual_norm(gvec, m) / std::sqrt(mu);
    if (res <= cfg.grad_tol) {
      CriticalPoint cp;
      cp.u = u;
      cp.lambda = lambda;
      cp.branch = "descent";
      cp.dichotomy = Dichotomy::MassReached;
      finalize(prob, cp);
      return cp;
    }
    VectorXcd d = -pre.solve(gvec);
    d -= (u.dot(m.cwiseProduct(d)).real() / mu) * u;
    const VectorXcd Sd = sys.S * d;
    const double slope = gvec.dot(d).real();
    // the preconditioned step has natural length ~1; never start below it
    t = std::max(t, 1.0);
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      VectorXcd ut;
      const double de = energy_change(Su, d, Sd, t, ut);
      if (e + de < -1e6) throw DivergenceError("energy below -1e6 on the mass sphere: unbounded below");
      if (de <= cfg.armijo * t * slope) {
        u = ut;
        e += de;
        accepted = true;
        t = std::min(t * 1.5, 1e3);
        break;
      }
      t *= 0.5;
    }
    if (!accepted) throw ConvergenceError("projected gradient stalled at residual " + sci(res));
  }
  throw ConvergenceError("projected gradient exhausted its iteration budget");
}

CriticalPoint penalized_critical_point(const VectorXcd& seed, const Problem& prob, const SolverConfig& cfg, double r,
                                       const std::vector<VectorXcd>& known) {
  if (!(r > 1.0)) throw ValidationError("r must exceed 1");
  const VectorXd& m = prob.sys->mass_diagonal;
  const double mu = prob.params.mu;
  VectorXcd u = seed;
  const double m0 = m.dot(u.cwiseAbs2());
  if (!(m0 > 0.0)) throw ConvergenceError("seed is zero: the trivial critical point is excluded");
  if (m0 >= mu) rescale_to(u, m, 0.9 * mu);
  const double lambda0 = 2.0 / mu * f_r_prime(m.dot(u.cwiseAbs2()) / mu, r);

  NewtonSolver newton(prob, cfg, NewtonMode{false, r}, known);
  NewtonOutcome out = newton.solve(u, lambda0);
  CriticalPoint cp;
  cp.u = out.u;
  cp.lambda = out.lambda;
  cp.r_final = r;
  finalize(prob, cp);
  EnergyParams pen = prob.params;
  pen.r = r;
  const EnergyReport rep = energy(*prob.sys, cp.u, pen);
  cp.trace.push_back({r, cp.mass, cp.lambda, rep.total, rep.penalty, out.iterations});
  return cp;
}

CriticalPoint constrained_newton(const VectorXcd& seed, double lambda0, const Problem& prob, const SolverConfig& cfg,
                                 const std::vector<VectorXcd>& known) {
  NewtonSolver newton(prob, cfg, NewtonMode{true, 2.0}, known);
  NewtonOutcome out = newton.solve(seed, lambda0);
  CriticalPoint cp;
  cp.u = out.u;
  cp.lambda = out.lambda;
  cp.dichotomy = Dichotomy::MassReached;
  finalize(prob, cp);
  return cp;
}

CriticalPoint r_continuation(const VectorXcd& seed, const Problem& prob, const SolverConfig& cfg,
                             const std::vector<VectorXcd>& known) {
  cfg.validate();
  const VectorXd& m = prob.sys->mass_diagonal;
  const double mu = prob.params.mu;
  VectorXcd u = seed;
  const double m0 = m.dot(u.cwiseAbs2());
  if (!(m0 > 0.0)) throw ConvergenceError("seed is zero: the trivial critical point is excluded");
  if (m0 >= mu) rescale_to(u, m, 0.9 * mu);

  std::vector<StageRecord> trace;
  CriticalPoint stage;
  bool have_stage = false;
  for (double r : cfg.r_schedule) {
    if (have_stage && stage.lambda > 0.0) {
      // predictor: the mass at which the new penalty reproduces the current multiplier
      const double s = mass_fraction_for_multiplier(stage.lambda, mu, r);
      rescale_to(u, m, s * mu);
    }
    stage = penalized_critical_point(u, prob, cfg, r, known);
    have_stage = true;
    trace.insert(trace.end(), stage.trace.begin(), stage.trace.end());
    u = stage.u;
    if ((mu - stage.mass) <= cfg.mass_tol * mu) {
      stage.dichotomy = Dichotomy::MassReached;
      stage.trace = trace;
      return stage;
    }
  }

  const double gap = (mu - stage.mass) / mu;
  if (std::abs(stage.lambda) <= 1e-6 && gap > 10.0 * cfg.mass_tol) {
    // free critical point below the target mass: the second alternative
    CriticalPoint cp = stage;
    cp.lambda = 0.0;
    finalize(prob, cp);
    cp.dichotomy = Dichotomy::MassStagnated;
    cp.trace = trace;
    return cp;
  }
  if (!cfg.polish) throw ConvergenceError("mass gap " + sci(gap) + " remains after the r schedule");
  CriticalPoint cp = constrained_newton(u, stage.lambda, prob, cfg, known);
  cp.r_final = stage.r_final;
  cp.trace = trace;
  return cp;
}

BranchResult multi_branch(const Problem& prob, const Spectrum& spec, const SolverConfig& cfg, int k) {
  if (k < 1) throw ValidationError("branch count must be positive");
  if (spec.size() < k) throw ValidationError("spectrum holds fewer eigenfunctions than requested branches");
  const VectorXd& m = prob.sys->mass_diagonal;
  const double mu = prob.params.mu;
  BranchResult result;
  std::vector<VectorXcd> found;
  for (int j = 0; j < k; ++j) {
    VectorXcd base = spec.vectors.col(j);
    rescale_to(base, m, std::min(0.9 * mu, mu));
    bool accepted = false;
    for (int attempt = 0; attempt <= 3 && !accepted; ++attempt) {
      VectorXcd seed = base;
      if (attempt > 0) {
        VectorXcd noise = random_field(prob.sys->dof_count, cfg.seed + 7919u * static_cast<unsigned>(j) + attempt);
        rescale_to(noise, m, 1.0);
        seed += 1e-2 * std::sqrt(mu) * noise;
      }
      CriticalPoint cp;
      try {
        cp = r_continuation(seed, prob, cfg, found);
      } catch (const ConvergenceError& e) {
        result.notes.push_back("branch phi_" + std::to_string(j + 1) + " attempt " + std::to_string(attempt) +
                               ": " + e.what());
        continue;
      }
      double nearest = INFINITY;
      for (const VectorXcd& f : found) nearest = std::min(nearest, orbit_distance(cp.u, f, m));
      if (nearest <= cfg.distinct_tol * std::sqrt(mu)) {
        result.notes.push_back("branch phi_" + std::to_string(j + 1) + " attempt " + std::to_string(attempt) +
                               ": re-found an earlier orbit");
        continue;
      }
      cp.branch = "phi_" + std::to_string(j + 1);
      cp.seed_index = j + 1;
      found.push_back(cp.u);
      result.points.push_back(std::move(cp));
      accepted = true;
    }
  }
  result.collapse = static_cast<int>(result.points.size()) < k;
  if (result.collapse)
    result.notes.push_back("BranchCollapse: " + std::to_string(result.points.size()) + " of " + std::to_string(k) +
                           " distinct orbits");
  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) { return a.energy < b.energy; });
  return result;
}

}  // namespace magnograph
