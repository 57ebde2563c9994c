#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ensform/configuration.hpp"
#include "ensform/digraph.hpp"
#include "ensform/ensemble.hpp"
#include "ensform/errors.hpp"
#include "ensform/parameterization.hpp"
#include "ensform/stochastic_lie.hpp"

namespace ensform {

/// Desired motion of the whole sampled ensemble: a configuration for every
/// (t, sigma), with an analytic time derivative when available (otherwise
/// central differences are used).
struct TargetTrajectory {
  std::function<Configuration(double, const Sigma&)> value;
  std::function<Configuration(double, const Sigma&)> derivative;  // may be empty
  double horizon = 0;

  Configuration eval(double t, const Sigma& sigma) const { return value(t, sigma); }

  Configuration deriv(double t, const Sigma& sigma, double h) const {
    if (derivative) return derivative(t, sigma);
    const double lo = std::max(0.0, t - h), hi = std::min(horizon, t + h);
    return (value(hi, sigma) - value(lo, sigma)) / (hi - lo);
  }
};

/// Square formation whose rotation rate and scaling rate depend on the
/// parameter's first coordinate.
struct RotatingSquareParams {
  double side = 1.0;
  double omega0 = 0.5, omega1 = 0.5;  // rotation rate omega0 + omega1 * sigma
  double rate0 = 0.0, rate1 = 0.0;    // scale 1 + (rate0 + rate1 * sigma) * t
};

inline TargetTrajectory rotating_scaling_square(const RotatingSquareParams& prm,
                                                double horizon) {
  Eigen::MatrixXd base(4, 2);
  const double h = prm.side / 2;
  base << h, h, -h, h, -h, -h, h, -h;
  auto rot = [](double th) {
    Eigen::Matrix2d r;
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return r;
  };
  TargetTrajectory target;
  target.horizon = horizon;
  target.value = [base, rot, prm](double t, const Sigma& s) {
    const double w = prm.omega0 + prm.omega1 * s(0);
    const double scale = 1 + (prm.rate0 + prm.rate1 * s(0)) * t;
    return Configuration(scale * base * rot(w * t).transpose());
  };
  target.derivative = [base, rot, prm](double t, const Sigma& s) {
    const double w = prm.omega0 + prm.omega1 * s(0);
    const double rate = prm.rate0 + prm.rate1 * s(0);
    const double scale = 1 + rate * t;
    Eigen::Matrix2d j;
    j << 0, -1, 1, 0;
    Eigen::MatrixXd r = rot(w * t);
    return Configuration(rate * base * r.transpose() +
                         scale * w * base * r.transpose() * j.transpose());
  };
  return target;
}

/// Simplex-anchored formation translating with a parameter-dependent
/// velocity along a fixed direction.
struct TranslatingSimplexParams {
  double vel0 = 1.0, vel1 = 0.0;  // speed vel0 + vel1 * sigma
  Eigen::VectorXd direction;      // defaults to e1
};

inline Configuration simplex_base_configuration(int n_agents, int dim) {
  if (n_agents < dim + 1) throw ConfigError("simplex base: needs at least n+1 agents");
  Configuration base = Configuration::Zero(n_agents, dim);
  for (int k = 0; k < dim; ++k) base(k + 1, k) = 1.0;
  for (int extra = dim + 1; extra < n_agents; ++extra)
    for (int k = 0; k < dim; ++k)
      base(extra, k) = 0.25 * (extra - dim) + 0.13 * k + 0.31;
  return base;
}

inline TargetTrajectory translating_simplex(int n_agents, int dim,
                                            const TranslatingSimplexParams& prm,
                                            double horizon) {
  Eigen::VectorXd dir = prm.direction;
  if (dir.size() == 0) {
    dir = Eigen::VectorXd::Zero(dim);
    dir(0) = 1.0;
  }
  if (dir.size() != dim) throw ConfigError("translating simplex: direction dimension mismatch");
  const Configuration base = simplex_base_configuration(n_agents, dim);
  TargetTrajectory target;
  target.horizon = horizon;
  target.value = [base, dir, prm, n_agents](double t, const Sigma& s) {
    const double v = prm.vel0 + prm.vel1 * s(0);
    Configuration x = base;
    x.rowwise() += (v * t * dir).transpose();
    return x;
  };
  target.derivative = [base, dir, prm, n_agents](double /*t*/, const Sigma& s) {
    const double v = prm.vel0 + prm.vel1 * s(0);
    Configuration dx = Configuration::Zero(base.rows(), base.cols());
    dx.rowwise() += (v * dir).transpose();
    return dx;
  };
  return target;
}

struct CoefficientSolve {
  Eigen::VectorXd c;
  double residual = 0;
};

/// Minimum-norm least-squares solve of sum_i c_i A_i x = xdot over the given
/// generator family. With a nondegenerate x and N > n+1 the system is
/// solvable, so a residual above tol signals a near-degenerate input.
inline CoefficientSolve solve_coefficients(const Configuration& x, const Eigen::MatrixXd& xdot,
                                           const std::vector<IntMatrix>& basis, double tol) {
  const int nn = static_cast<int>(x.rows() * x.cols());
  Eigen::MatrixXd m(nn, static_cast<int>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::MatrixXd img = to_dense(basis[k]) * x;
    m.col(static_cast<int>(k)) = Eigen::Map<Eigen::VectorXd>(img.data(), img.size());
  }
  Eigen::MatrixXd rhs = xdot;
  Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
  cod.setThreshold(kDefaultRankTol);
  CoefficientSolve out;
  out.c = cod.solve(b);
  out.residual = (m * out.c - b).norm();
  if (out.residual > tol * std::max(1.0, b.norm()))
    throw NumericError("solve_coefficients: residual " + std::to_string(out.residual) +
                       " above tolerance; configuration is near-degenerate");
  return out;
}

struct MonomialFit {
  MonomialControl control;
  double delta = 0;  // sup over the sample grid of |fitted sum - target|
  bool ill_conditioned = false;
};

/// Least-squares fit, per basis index and time sample, of the coefficient
/// functions by monomials in the parameterization functions. The target is
/// divided by the designated nonzero function to the power diameter+1 before
/// fitting, and every emitted exponent vector is shifted back up by that
/// power, so all monomials reach the required minimum degree. A severely
/// ill-conditioned design matrix switches the solve to a ridge fallback and
/// is flagged, not fatal.
inline MonomialFit fit_monomials(const std::vector<std::vector<Eigen::VectorXd>>& c_samples,
                                 double t0, double dt_samples, const ParameterizationSet& p,
                                 const SigmaGrid& grid, int degree_cap, int diameter,
                                 double rank_tol = kDefaultRankTol, double ridge = 1e-12) {
  if (c_samples.empty()) throw std::invalid_argument("fit_monomials: no samples");
  const int n_times = static_cast<int>(c_samples.size());
  const int n_sigma = static_cast<int>(grid.size());
  const int gamma = static_cast<int>(c_samples.front().front().size());
  const int shift = diameter + 1;
  const int nz = p.nonzero_index();
  p.require_nonzero_on(grid);

  const auto exponents = monomials_up_to_degree(p.size(), degree_cap);
  const int n_mono = static_cast<int>(exponents.size());

  Eigen::MatrixXd design(n_sigma, n_mono);
  Eigen::VectorXd unshift(n_sigma);  // rho_nz^(-shift) at each sample
  for (int m = 0; m < n_sigma; ++m) {
    for (int q = 0; q < n_mono; ++q)
      design(m, q) = eval_monomial(exponents[q], p, grid.samples[m]);
    unshift(m) = std::pow(p.eval(nz, grid.samples[m]), -shift);
  }

  MonomialFit out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  double smallest_kept = sv(0);
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > rank_tol * sv(0)) smallest_kept = sv(k);
  out.ill_conditioned = sv(0) > 0 && smallest_kept / sv(0) < 1e-13;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(rank_tol);
  Eigen::LDLT<Eigen::MatrixXd> ridge_solver;
  if (out.ill_conditioned) {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += ridge;
    ridge_solver.compute(gram);
  }

  // One solve per (basis index, time sample); shared factorization.
  std::vector<std::vector<Eigen::VectorXd>> weights(
      gamma, std::vector<Eigen::VectorXd>(n_times));
  for (int i = 0; i < gamma; ++i) {
    for (int q = 0; q < n_times; ++q) {
      Eigen::VectorXd y(n_sigma);
      for (int m = 0; m < n_sigma; ++m) y(m) = c_samples[q][m](i) * unshift(m);
      weights[i][q] = out.ill_conditioned
                          ? Eigen::VectorXd(ridge_solver.solve(design.transpose() * y))
                          : Eigen::VectorXd(cod.solve(y));
    }
  }

  MonomialControl control(gamma, shift);
  for (int i = 0; i < gamma; ++i) {
    for (int q = 0; q < n_mono; ++q) {
      std::vector<double> series(n_times);
      bool nonzero = false;
      for (int t = 0; t < n_times; ++t) {
        series[t] = weights[i][t](q);
        nonzero = nonzero || series[t] != 0.0;
      }
      if (!nonzero) continue;
      std::vector<int> e = exponents[q];
      e[nz] += shift;
      control.add_term(i, std::move(e), TimeSeries(t0, dt_samples, std::move(series)));
    }
  }

  // Residual straight from the assembled control, not fit bookkeeping.
  const auto table = control.monomial_table(p, grid);
  for (int q = 0; q < n_times; ++q) {
    const double t = t0 + q * dt_samples;
    for (int m = 0; m < n_sigma; ++m)
      for (int i = 0; i < gamma; ++i)
        out.delta = std::max(out.delta, std::abs(control.coefficient_from_table(i, t, table, m) -
                                                 c_samples[q][m](i)));
  }
  out.control = std::move(control);
  return out;
}

/// Smooth cutoff: 1 at 0, identically 0 from tau on, monotone, all
/// derivatives vanishing at tau.
inline double bump(double t, double tau) {
  if (t <= 0) return 1.0;
  if (t >= tau) return 0.0;
  return std::exp(1.0 - tau * tau / (tau * tau - t * t));
}

inline double bump_derivative(double t, double tau) {
  if (t <= 0 || t >= tau) return 0.0;
  const double d = tau * tau - t * t;
  return bump(t, tau) * (-2.0 * tau * tau * t / (d * d));
}

/// Blend of the target with the actual initial condition: the offset decays
/// through a smooth bump over [0, tau]. The result is only defined at the
/// grid samples (offsets exist per sample). Every sampled blend state must
/// stay nondegenerate; violations surface at the synthesis solves.
inline TargetTrajectory connect_initial(const EnsembleState& x0, const TargetTrajectory& target,
                                        double blend_time, double eps_init,
                                        double tol = kDefaultRankTol) {
  x0.validate();
  const SigmaGrid grid = x0.grid;
  std::vector<Configuration> offsets;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    Configuration off = x0.configs[m] - target.eval(x0.t, grid.samples[m]);
    if (off.norm() >= eps_init)
      throw HypothesisError("connect_initial: initial offset " + std::to_string(off.norm()) +
                            " at sample " + std::to_string(m) + " exceeds the admissible bound");
    offsets.push_back(std::move(off));
  }
  const double t_start = x0.t;
  auto sample_index = [grid](const Sigma& s) -> std::size_t {
    for (std::size_t m = 0; m < grid.samples.size(); ++m)
      if (grid.samples[m] == s) return m;
    throw HypothesisError("connect_initial: blended target is defined on grid samples only");
  };
  TargetTrajectory blended;
  blended.horizon = target.horizon;
  blended.value = [target, offsets, sample_index, blend_time, t_start](double t,
                                                                       const Sigma& s) {
    return Configuration(target.eval(t, s) +
                         bump(t - t_start, blend_time) * offsets[sample_index(s)]);
  };
  const double fd_h = 1e-6;
  blended.derivative = [target, offsets, sample_index, blend_time, t_start, fd_h](
                           double t, const Sigma& s) {
    return Configuration(target.deriv(t, s, fd_h) +
                         bump_derivative(t - t_start, blend_time) * offsets[sample_index(s)]);
  };
  // The blend must start in the nondegenerate set; later samples are checked
  // where they are used.
  for (std::size_t m = 0; m < grid.size(); ++m)
    if (!is_nondegenerate(x0.configs[m], tol))
      throw HypothesisError("connect_initial: blended start leaves the nondegenerate set at sample " +
                            std::to_string(m));
  return blended;
}

/// Conservative a posteriori tracking bound: a coefficient mismatch of size
/// delta drives the state through gamma generators for time T, amplified by
/// the flow's Lipschitz factor. A reporting heuristic, not a theorem.
inline double error_bound(double delta, int gamma, double max_basis_norm, double max_coefficient,
                          double state_bound, double T) {
  const double lipschitz = gamma * max_coefficient * max_basis_norm;
  return delta * gamma * max_basis_norm * state_bound * T * std::exp(lipschitz * T);
}

struct TrackConfig {
  int degree_cap = 8;
  double dt = 1e-3;
  double solve_tol = 1e-8;
  double rank_tol = kDefaultRankTol;
  double ridge = 1e-12;
  double blend_time = 0.25;
  double eps_init = 1.0;
  double horizon = -1;  // < 0: use the schedule horizon
  bool feedback = false;
  int jobs = 1;
};

struct TrackingReport {
  double delta = 0;        // sup fit residual on the synthesis grid
  double delta_dense = 0;  // includes inter-sample times (interpolation gap)
  double sup_error = 0;
  std::vector<std::vector<double>> per_sample_error;  // [sample][time index]
  double bound = 0;
  double kappa = 0;
  double max_coefficient = 0;
  double max_basis_norm = 0;
  double state_bound = 0;
  int gamma = 0;
  bool fit_ill_conditioned = false;
  std::vector<std::size_t> segment_start_indices;
};

namespace detail {

/// Closed-loop variant used behind TrackConfig::feedback: at every step the
/// coefficients are re-solved on the current states, fitted across the grid
/// at that instant, and held constant over the step.
inline Trajectory feedback_integrate(const EnsembleState& init,
                                     const TargetTrajectory& reference,
                                     const std::vector<IntMatrix>& basis,
                                     const ParameterizationSet& p, const SigmaGrid& grid,
                                     double t_a, double t_b, int diameter,
                                     const TrackConfig& cfg, TrackingReport& rep) {
  const auto steps = static_cast<std::size_t>(std::llround((t_b - t_a) / cfg.dt));
  const int gamma = static_cast<int>(basis.size());
  const int shift = diameter + 1;
  const int nz = p.nonzero_index();
  const auto exponents = monomials_up_to_degree(p.size(), cfg.degree_cap);
  const int n_sigma = static_cast<int>(grid.size());
  Eigen::MatrixXd design(n_sigma, static_cast<int>(exponents.size()));
  Eigen::VectorXd unshift(n_sigma);
  for (int m = 0; m < n_sigma; ++m) {
    for (std::size_t q = 0; q < exponents.size(); ++q)
      design(m, static_cast<int>(q)) = eval_monomial(exponents[q], p, grid.samples[m]);
    unshift(m) = std::pow(p.eval(nz, grid.samples[m]), -shift);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(cfg.rank_tol);

  Trajectory traj;
  traj.grid = grid;
  traj.times = {0.0};
  traj.states = {init.configs};
  std::vector<Configuration> current = init.configs;
  for (std::size_t q = 0; q < steps; ++q) {
    const double t = t_a + static_cast<double>(q) * cfg.dt;
    Eigen::MatrixXd coeffs(n_sigma, gamma);
    for (int m = 0; m < n_sigma; ++m) {
      const Eigen::MatrixXd xdot = reference.deriv(t, grid.samples[m], cfg.dt);
      CoefficientSolve s = solve_coefficients(current[m], xdot, basis, cfg.solve_tol);
      coeffs.row(m) = s.c.transpose();
      rep.max_coefficient = std::max(rep.max_coefficient, s.c.cwiseAbs().maxCoeff());
    }
    Eigen::MatrixXd fitted(n_sigma, gamma);
    for (int i = 0; i < gamma; ++i) {
      Eigen::VectorXd y = coeffs.col(i).cwiseProduct(unshift);
      Eigen::VectorXd w = cod.solve(y);
      fitted.col(i) = (design * w).cwiseQuotient(unshift);
      rep.delta = std::max(rep.delta, (fitted.col(i) - coeffs.col(i)).cwiseAbs().maxCoeff());
    }
    for (int m = 0; m < n_sigma; ++m) {
      const int big_n = static_cast<int>(current[m].rows());
      Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(big_n, big_n);
      for (int i = 0; i < gamma; ++i)
        if (fitted(m, i) != 0.0) gen += fitted(m, i) * to_dense(basis[i]);
      Configuration& x = current[m];
      const Eigen::MatrixXd k1 = gen * x;
      const Eigen::MatrixXd k2 = gen * (x + (cfg.dt / 2) * k1);
      const Eigen::MatrixXd k3 = gen * (x + (cfg.dt / 2) * k2);
      const Eigen::MatrixXd k4 = gen * (x + cfg.dt * k3);
      x += (cfg.dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!x.allFinite())
        throw NumericError("track: feedback state blew up at t=" + std::to_string(t + cfg.dt) +
                           ", sample " + std::to_string(m));
    }
    traj.times.push_back(static_cast<double>(q + 1) * cfg.dt);
    traj.states.push_back(current);
  }
  return traj;
}

inline void check_target_smoothness(const TargetTrajectory& target, const SigmaGrid& grid,
                                    double T) {
  if (!(T > 0)) return;
  const double h = T / 64;
  for (double frac : {0.3, 0.7}) {
    const double t = frac * T;
    for (std::size_t m : {std::size_t{0}, grid.size() - 1}) {
      const Sigma& s = grid.samples[m];
      auto fd = [&](double step) {
        return ((target.eval(t + step, s) - target.eval(t - step, s)) / (2 * step)).eval();
      };
      const double scale = 1 + target.eval(t, s).norm() / std::max(T, 1e-9);
      const double e1 = (fd(h) - target.deriv(t, s, h)).norm();
      const double e2 = (fd(h / 2) - target.deriv(t, s, h / 2)).norm();
      // second-order consistency: quartering of the mismatch, with slack
      if (e1 > 1e-5 * scale && e2 > 0.5 * e1)
        throw NumericError("target: derivative fails the finite-difference refinement check");
    }
  }
}

}  // namespace detail

/// Open-loop synthesis and simulation: per schedule segment, build the
/// uniform-depth generator basis, solve the coefficient functions on the
/// (blended) target over the time/parameter grid, fit them by admissible
/// monomials, and integrate the extended dynamics; segments re-synthesize
/// from the reached state. The report carries the fit residual, the measured
/// tracking error against the original target, and the a posteriori bound.
inline std::pair<Trajectory, TrackingReport> track(const TargetTrajectory& target,
                                                   const GraphSchedule& schedule,
                                                   const ParameterizationSet& p,
                                                   const SigmaGrid& grid,
                                                   const EnsembleState& x0,
                                                   const TrackConfig& cfg) {
  x0.validate();
  const int big_n = static_cast<int>(x0.configs.front().rows());
  const int dim = static_cast<int>(x0.configs.front().cols());
  if (big_n <= dim + 1)
    throw HypothesisError("track: requires N > n+1 agents");
  p.require_nonzero_on(grid);
  if (!check_separation(p, grid).separated)
    throw HypothesisError("track: parameterization functions do not separate the grid");
  const double T = cfg.horizon < 0 ? schedule.horizon() : cfg.horizon;
  if (target.horizon < T - 1e-12)
    throw ConfigError("track: target horizon shorter than the experiment");
  detail::check_target_smoothness(target, grid, T);

  TrackingReport rep;
  Trajectory traj;
  traj.grid = grid;
  traj.times = {0.0};
  traj.states = {x0.configs};

  EnsembleState current = x0;
  current.t = 0;

  for (std::size_t seg = 0; seg < schedule.segments().size() && T > 0; ++seg) {
    const double t_a = schedule.segments()[seg].first;
    const double t_b = std::min(schedule.segment_end(seg), T);
    if (t_b <= t_a + 1e-15) continue;
    rep.segment_start_indices.push_back(traj.times.size() - 1);
    const Digraph& g = schedule.segments()[seg].second;
    const int diam = g.diameter();

    std::vector<IntMatrix> basis;
    for (auto& [word, value] : codist_basis(g, codist_min_depth(g))) basis.push_back(value);
    rep.gamma = static_cast<int>(basis.size());
    for (const auto& b : basis) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_dense(b));
      rep.max_basis_norm = std::max(rep.max_basis_norm, svd.singularValues()(0));
    }
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const double rho = p.eval(p.nonzero_index(), grid.samples[m]);
      rep.kappa = std::max(rep.kappa, std::pow(std::abs(rho), -(diam + 1)));
    }

    // Blend the actual segment-start state into the target.
    double max_offset = 0;
    for (std::size_t m = 0; m < grid.size(); ++m)
      max_offset = std::max(
          max_offset, (current.configs[m] - target.eval(t_a, grid.samples[m])).norm());
    const bool matched = max_offset < 1e-13;
    const double tau = std::min(cfg.blend_time, (t_b - t_a) / 2);
    TargetTrajectory reference =
        matched ? target : connect_initial(current, target, tau, cfg.eps_init, cfg.rank_tol);

    const auto steps = static_cast<std::size_t>(std::llround((t_b - t_a) / cfg.dt));
    if (std::abs(steps * cfg.dt - (t_b - t_a)) > 1e-6 * cfg.dt * std::max<std::size_t>(steps, 1))
      throw ConfigError("track: dt must divide the segment length");

    auto solve_at = [&](double t, std::size_t m) {
      const Configuration xt = reference.eval(t, grid.samples[m]);
      if (!is_nondegenerate(xt, cfg.rank_tol))
        throw HypothesisError("track: target leaves the nondegenerate set at t=" +
                              std::to_string(t) + ", sample " + std::to_string(m));
      const Eigen::MatrixXd xdot = reference.deriv(t, grid.samples[m], cfg.dt);
      return solve_coefficients(xt, xdot, basis, cfg.solve_tol);
    };

    MonomialControl control;
    if (!cfg.feedback) {
      std::vector<std::vector<Eigen::VectorXd>> c_samples(steps + 1);
      for (std::size_t q = 0; q <= steps; ++q) {
        const double t = t_a + static_cast<double>(q) * cfg.dt;
        c_samples[q].resize(grid.size());
        for (std::size_t m = 0; m < grid.size(); ++m) {
          CoefficientSolve s = solve_at(t, m);
          rep.max_coefficient =
              std::max(rep.max_coefficient, s.c.cwiseAbs().maxCoeff());
          c_samples[q][m] = std::move(s.c);
        }
      }
      MonomialFit fit = fit_monomials(c_samples, t_a, cfg.dt, p, grid, cfg.degree_cap, diam,
                                      cfg.rank_tol, cfg.ridge);
      rep.delta = std::max(rep.delta, fit.delta);
      rep.fit_ill_conditioned = rep.fit_ill_conditioned || fit.ill_conditioned;
      control = std::move(fit.control);

      // residual at inter-sample times, where linear interpolation of the
      // control leaves a gap
      const auto table = control.monomial_table(p, grid);
      for (std::size_t q = 0; q < steps; ++q) {
        const double t = t_a + (static_cast<double>(q) + 0.5) * cfg.dt;
        for (std::size_t m = 0; m < grid.size(); ++m) {
          const CoefficientSolve s = solve_at(t, m);
          for (int i = 0; i < rep.gamma; ++i)
            rep.delta_dense =
                std::max(rep.delta_dense,
                         std::abs(control.coefficient_from_table(i, t, table, m) - s.c(i)));
        }
      }
    } else {
      // Feedback variant: re-solve on the current state at every step and
      // fit the instantaneous coefficients across the grid.
      control = MonomialControl(rep.gamma, diam + 1);
    }

    // integrate this segment
    GraphSchedule seg_schedule = GraphSchedule::constant(g, t_b - t_a);
    EnsembleState seg_init;
    seg_init.grid = grid;
    seg_init.configs = current.configs;
    Trajectory seg_traj;
    if (!cfg.feedback) {
      const auto table = control.monomial_table(p, grid);
      std::vector<FieldFn> fields{[&](double t, std::size_t m, const Eigen::MatrixXd& x) {
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(big_n, big_n);
        for (int i = 0; i < rep.gamma; ++i) {
          const double c = control.coefficient_from_table(i, t_a + t, table, m);
          if (c != 0.0) gen += c * to_dense(basis[static_cast<std::size_t>(i)]);
        }
        return Eigen::MatrixXd(gen * x);
      }};
      seg_traj = integrate(seg_init, fields, seg_schedule, cfg.dt, t_b - t_a, cfg.jobs);
    } else {
      seg_traj = detail::feedback_integrate(seg_init, reference, basis, p, grid, t_a, t_b, diam,
                                            cfg, rep);
    }

    for (std::size_t q = 1; q < seg_traj.times.size(); ++q) {
      traj.times.push_back(t_a + seg_traj.times[q]);
      traj.states.push_back(seg_traj.states[q]);
    }
    current.configs = traj.states.back();
    current.t = t_b;
  }

  // Tracking error against the original target on the step grid.
  rep.per_sample_error.assign(grid.size(), std::vector<double>(traj.times.size(), 0.0));
  for (std::size_t q = 0; q < traj.times.size(); ++q) {
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const Configuration goal = target.eval(traj.times[q], grid.samples[m]);
      const double err = (traj.states[q][m] - goal).norm();
      rep.per_sample_error[m][q] = err;
      rep.sup_error = std::max(rep.sup_error, err);
      rep.state_bound = std::max({rep.state_bound, goal.norm(), traj.states[q][m].norm()});
    }
  }
  rep.bound = error_bound(std::max(rep.delta, rep.delta_dense), rep.gamma, rep.max_basis_norm,
                          rep.max_coefficient, rep.state_bound, T);
  return {std::move(traj), std::move(rep)};
}

}  // namespace ensform
