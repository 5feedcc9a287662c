#include "fcm/learner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace fcm {

void LearnConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be >= 0");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) throw ConfigError("clampEps must lie in (0, 0.5)");
  if (!(entropy_floor > 0.0)) throw ConfigError("entropyFloor must be > 0");
  if (!(smooth_mu > 0.0)) throw ConfigError("smoothMu must be > 0");
  if (max_iters < 1) throw ConfigError("maxIters must be >= 1");
  if (!(grad_tol > 0.0)) throw ConfigError("gradTol must be > 0");
  if (!(obj_tol > 0.0)) throw ConfigError("objTol must be > 0");
}

Matrix assemble_design(const ResponseSet& rs) {
  rs.validate(2);
  const auto k = static_cast<Eigen::Index>(rs.k());
  const auto n = static_cast<Eigen::Index>(rs.n());
  Matrix x(static_cast<Eigen::Index>(rs.m()) * (k - 1), n);
  Eigen::Index row = 0;
  for (const auto& d : rs.sequences) {
    x.middleRows(row, k - 1) = d.topRows(k - 1);
    row += k - 1;
  }
  return x;
}

Vector assemble_target(const ResponseSet& rs, std::size_t i, const LearnConfig& cfg) {
  rs.validate(2);
  if (i >= rs.n()) throw DimensionError("node index " + std::to_string(i) + " out of range");
  const auto k = static_cast<Eigen::Index>(rs.k());
  const auto col = static_cast<Eigen::Index>(i);
  Vector y(static_cast<Eigen::Index>(rs.m()) * (k - 1));
  Eigen::Index row = 0;
  for (const auto& d : rs.sequences) {
    for (Eigen::Index t = 1; t < k; ++t) y(row++) = activate_inverse(d(t, col), cfg.activation, cfg.clamp_eps);
  }
  return y;
}

NodeSystem assemble_system(const ResponseSet& rs, std::size_t i, const LearnConfig& cfg) {
  return NodeSystem{assemble_design(rs), assemble_target(rs, i, cfg), i};
}

namespace {

void check_shapes(const Vector& w, const NodeSystem& sys) {
  if (sys.x.rows() != sys.y.size()) throw DimensionError("X and Y row counts differ");
  if (w.size() != sys.x.cols()) {
    throw DimensionError("weight vector length " + std::to_string(w.size()) + " does not match " +
                         std::to_string(sys.x.cols()) + " columns of X");
  }
}

void check_box(const Vector& w) {
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (!(std::abs(w(j)) <= 1.0)) throw DataError("weight vector outside the box [-1, 1]");
  }
}

// sum_j p_j ln p_j, i.e. -H(w).
double negative_entropy(const Vector& w, double floor) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double p = 0.5 * (w(j) + 1.0);
    if (p > 0.0) acc += p * std::log(std::max(p, floor));
  }
  return acc;
}

double entropy_slope(double wj, double floor) {
  return 0.5 * (std::log(std::max(0.5 * (wj + 1.0), floor)) + 1.0);
}

double entropy_curvature(double wj, double floor) {
  return 0.25 / std::max(0.5 * (wj + 1.0), floor);
}

// Minimizes sqrt(||Xw - Y||^2 + mu^2) + beta |w|_1 - alpha H(w) over the box.
//
// Projected Newton iteration with two kinds of active constraints: the box
// faces and the sign orthants of the L1 term. The residual norm is modelled
// by its Gauss-Newton majorizer X^T X / s (s = current smoothed norm), the
// entropy term by its exact diagonal curvature. Steps are projected back onto
// the current orthant and the box; Armijo backtracking keeps the merit value
// nonincreasing.
class ColumnSolver {
 public:
  ColumnSolver(const Matrix& x, const Matrix& gram, const Vector& y, const LearnConfig& cfg)
      : x_(x), gram_(gram), y_(y), cfg_(cfg), n_(x.cols()) {}

  SolveResult run() {
    SolveResult res;
    Vector w = Vector::Zero(n_);
    Vector r = x_ * w - y_;
    double f = merit(w, r);
    check_finite(f);
    res.trace.push_back(f);

    Vector g(n_), xtr(n_), q(n_), d(n_), trial(n_), r_trial(y_.size());
    for (int iter = 0; iter < cfg_.max_iters; ++iter) {
      const double s = std::sqrt(r.squaredNorm() + cfg_.smooth_mu * cfg_.smooth_mu);
      xtr.noalias() = x_.transpose() * r;
      g = xtr / s;
      for (Eigen::Index j = 0; j < n_; ++j) g(j) += cfg_.alpha * entropy_slope(w(j), cfg_.entropy_floor);
      pseudo_gradient(w, g, q);
      check_finite(q.squaredNorm());

      const double qmax = q.cwiseAbs().maxCoeff();
      if (qmax < cfg_.grad_tol) {
        res.converged = true;
        res.stop_reason = "projected gradient below gradTol";
        break;
      }

      direction(w, q, s, xtr, d);

      // Armijo backtracking along the projection arc.
      double t = 1.0;
      bool accepted = false;
      double f_trial = f;
      while (t > 1e-20) {
        for (Eigen::Index j = 0; j < n_; ++j) trial(j) = project(w(j), q(j), w(j) + t * d(j));
        r_trial.noalias() = x_ * trial - y_;
        f_trial = merit(trial, r_trial);
        const double predicted = q.dot(trial - w);
        if (std::isfinite(f_trial) && f_trial <= f + kArmijo * predicted && predicted < 0.0) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        res.converged = true;
        res.stop_reason = "no further descent along the projected direction";
        break;
      }

      const double decrease = f - f_trial;
      w.swap(trial);
      r.swap(r_trial);
      f = f_trial;
      res.trace.push_back(f);
      res.iterations = iter + 1;
      if (decrease <= cfg_.obj_tol * std::max(1.0, std::abs(f))) {
        res.converged = true;
        res.stop_reason = "relative objective decrease below objTol";
        break;
      }
    }
    if (res.stop_reason.empty()) res.stop_reason = "maxIters reached";
    res.w = std::move(w);
    return res;
  }

 private:
  static constexpr double kArmijo = 1e-4;

  double merit(const Vector& w, const Vector& r) const {
    const double mu = cfg_.smooth_mu;
    return std::sqrt(r.squaredNorm() + mu * mu) + cfg_.beta * w.lpNorm<1>() +
           cfg_.alpha * negative_entropy(w, cfg_.entropy_floor);
  }

  static void check_finite(double v) {
    if (!std::isfinite(v)) throw NumericalError("non-finite value in column solve (corrupted input?)");
  }

  // Minimum-norm subgradient of the L1 term plus the smooth gradient, with
  // components that would leave the box zeroed.
  void pseudo_gradient(const Vector& w, const Vector& g, Vector& q) const {
    const double beta = cfg_.beta;
    for (Eigen::Index j = 0; j < n_; ++j) {
      double v;
      if (w(j) > 0.0) {
        v = g(j) + beta;
      } else if (w(j) < 0.0) {
        v = g(j) - beta;
      } else if (g(j) + beta < 0.0) {
        v = g(j) + beta;
      } else if (g(j) - beta > 0.0) {
        v = g(j) - beta;
      } else {
        v = 0.0;
      }
      if (w(j) >= 1.0 && v < 0.0) v = 0.0;
      if (w(j) <= -1.0 && v > 0.0) v = 0.0;
      q(j) = v;
    }
  }

  // Keeps a coordinate inside its current orthant (the orthant it is about
  // to enter, when it sits at zero) and inside the box.
  double project(double wj, double qj, double candidate) const {
    double orthant = wj > 0.0 ? 1.0 : (wj < 0.0 ? -1.0 : (qj < 0.0 ? 1.0 : (qj > 0.0 ? -1.0 : 0.0)));
    if (cfg_.beta > 0.0 && candidate * orthant <= 0.0) return 0.0;
    return std::clamp(candidate, -1.0, 1.0);
  }

  void direction(const Vector& w, const Vector& q, double s, const Vector& xtr, Vector& d) {
    // Coordinates pinned by a constraint (q == 0), or pressed against a
    // nearby box face or zero, take a diagonally scaled gradient step; the
    // rest a Newton step on the reduced system.
    const double eps = std::min(1e-3, q.cwiseAbs().maxCoeff());
    free_.clear();
    for (Eigen::Index j = 0; j < n_; ++j) {
      const bool pinned = q(j) == 0.0;
      const bool near_upper = w(j) >= 1.0 - eps && q(j) < 0.0;
      const bool near_lower = w(j) <= -1.0 + eps && q(j) > 0.0;
      // under L1, a small weight heading for zero is treated like one on a face
      const bool near_zero = cfg_.beta > 0.0 && w(j) != 0.0 && std::abs(w(j)) <= eps && w(j) * q(j) > 0.0;
      if (!pinned && !near_upper && !near_lower && !near_zero) free_.push_back(j);
    }

    auto diag = [&](Eigen::Index j) {
      return gram_(j, j) / s + cfg_.alpha * entropy_curvature(w(j), cfg_.entropy_floor);
    };
    const double ridge = 1e-12 * (gram_.diagonal().sum() / static_cast<double>(n_) / s + 1.0);

    for (Eigen::Index j = 0; j < n_; ++j) d(j) = q(j) == 0.0 ? 0.0 : -q(j) / (diag(j) + ridge);

    // A coordinate sitting on a constraint (zero under L1, or a box face) may
    // only leave it in the steepest-descent direction. Those whose Newton
    // step points the other way are fixed and the reduced system re-solved,
    // so the remaining steps account for them staying put.
    for (;;) {
      const auto nf = static_cast<Eigen::Index>(free_.size());
      if (nf == 0) return;
      Matrix h(nf, nf);
      Vector rhs(nf), u(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        for (Eigen::Index b = 0; b < nf; ++b) h(a, b) = gram_(free_[a], free_[b]) / s;
        h(a, a) += cfg_.alpha * entropy_curvature(w(free_[a]), cfg_.entropy_floor) + ridge;
        rhs(a) = -q(free_[a]);
        u(a) = xtr(free_[a]) / (s * std::sqrt(s));
      }
      // Exact Hessian of the smoothed norm first; it drops the curvature
      // along the residual that the Gauss-Newton majorizer XtX/s overstates.
      Vector step;
      Eigen::LDLT<Matrix> ldlt(h - u * u.transpose());
      if (ldlt.info() == Eigen::Success) step = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(rhs) <= 0.0) {
        ldlt.compute(h);
        step = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(rhs) <= 0.0) return;
      }
      std::vector<Eigen::Index> keep;
      for (Eigen::Index a = 0; a < nf; ++a) {
        const Eigen::Index j = free_[a];
        const bool on_constraint = (cfg_.beta > 0.0 && w(j) == 0.0) || std::abs(w(j)) >= 1.0;
        if (on_constraint && step(a) * q(j) >= 0.0) {
          d(j) = 0.0;
        } else {
          keep.push_back(j);
        }
      }
      if (static_cast<Eigen::Index>(keep.size()) == nf) {
        for (Eigen::Index a = 0; a < nf; ++a) d(free_[a]) = step(a);
        return;
      }
      free_.swap(keep);
    }
  }

  const Matrix& x_;
  const Matrix& gram_;
  const Vector& y_;
  const LearnConfig& cfg_;
  Eigen::Index n_;
  std::vector<Eigen::Index> free_;
};

SolveResult solve_with_gram(const Matrix& x, const Matrix& gram, const Vector& y, const LearnConfig& cfg) {
  if (!x.allFinite() || !y.allFinite()) throw NumericalError("non-finite entries in the node system");
  SolveResult res = ColumnSolver(x, gram, y, cfg).run();
  const NodeSystem view{x, y, 0};
  res.objective = objective(res.w, view, cfg);
  const Vector origin = Vector::Zero(x.cols());
  const double at_origin = objective(origin, view, cfg);
  // The smoothed merit can differ from the exact objective by up to mu.
  if (res.objective > at_origin) {
    res.w = origin;
    res.objective = at_origin;
  }
  return res;
}

}  // namespace

double entropy_surrogate(const Vector& w, double entropy_floor) {
  return -negative_entropy(w, entropy_floor);
}

double objective(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg) {
  check_shapes(w, sys);
  check_box(w);
  return (sys.x * w - sys.y).norm() + cfg.beta * w.lpNorm<1>() -
         cfg.alpha * entropy_surrogate(w, cfg.entropy_floor);
}

double smoothed_objective(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg) {
  check_shapes(w, sys);
  check_box(w);
  const double mu2 = cfg.smooth_mu * cfg.smooth_mu;
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) l1 += std::sqrt(w(j) * w(j) + mu2);
  return std::sqrt((sys.x * w - sys.y).squaredNorm() + mu2) + cfg.beta * l1 +
         cfg.alpha * negative_entropy(w, cfg.entropy_floor);
}

Vector objective_gradient(const Vector& w, const NodeSystem& sys, const LearnConfig& cfg) {
  check_shapes(w, sys);
  check_box(w);
  const double mu2 = cfg.smooth_mu * cfg.smooth_mu;
  const Vector r = sys.x * w - sys.y;
  Vector g = sys.x.transpose() * r / std::sqrt(r.squaredNorm() + mu2);
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    g(j) += cfg.beta * w(j) / std::sqrt(w(j) * w(j) + mu2);
    g(j) += cfg.alpha * entropy_slope(w(j), cfg.entropy_floor);
  }
  return g;
}

SolveResult solve_column_detailed(const NodeSystem& sys, const LearnConfig& cfg) {
  cfg.validate();
  if (sys.x.rows() == 0 || sys.x.cols() == 0) throw DimensionError("empty node system");
  if (sys.x.rows() != sys.y.size()) throw DimensionError("X and Y row counts differ");
  const Matrix gram = sys.x.transpose() * sys.x;
  return solve_with_gram(sys.x, gram, sys.y, cfg);
}

Vector solve_column(const NodeSystem& sys, const LearnConfig& cfg) {
  return solve_column_detailed(sys, cfg).w;
}

WeightMatrix learn(const ResponseSet& rs, const LearnConfig& cfg, unsigned threads) {
  cfg.validate();
  rs.validate(2);
  const Matrix x = assemble_design(rs);
  const Matrix gram = x.transpose() * x;
  const std::size_t n = rs.n();

  std::vector<Vector> columns(n);
  auto solve_one = [&](std::size_t i) {
    const Vector y = assemble_target(rs, i, cfg);
    columns[i] = solve_with_gram(x, gram, y, cfg).w;
  };

  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) solve_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            solve_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  Matrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) w.col(static_cast<Eigen::Index>(i)) = columns[i].cwiseMax(-1.0).cwiseMin(1.0);
  return WeightMatrix(std::move(w));
}

}  // namespace fcm
