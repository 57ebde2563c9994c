#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "ensform/configuration.hpp"
#include "ensform/digraph.hpp"
#include "ensform/errors.hpp"
#include "ensform/int_matrix.hpp"
#include "ensform/parameterization.hpp"

namespace ensform {

/// Scalar signal sampled on a uniform time grid, evaluated by linear
/// interpolation and clamped outside the grid.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(double t0, double dt, std::vector<double> values)
      : t0_(t0), dt_(dt), values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("time series: needs at least one sample");
    if (!(dt_ > 0) && values_.size() > 1)
      throw ConfigError("time series: step must be positive");
    for (double v : values_)
      if (!std::isfinite(v)) throw ConfigError("time series: non-finite sample");
  }

  static TimeSeries constant(double v) { return TimeSeries(0.0, 1.0, {v}); }

  double operator()(double t) const {
    if (values_.size() == 1) return values_.front();
    double u = (t - t0_) / dt_;
    if (u <= 0) return values_.front();
    if (u >= static_cast<double>(values_.size() - 1)) return values_.back();
    const auto k = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(k);
    return (1 - w) * values_[k] + w * values_[k + 1];
  }

  double start() const { return t0_; }
  double step() const { return dt_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double t0_ = 0, dt_ = 1;
  std::vector<double> values_;
};

/// Per-edge, per-function control signals of the formation dynamics.
/// Missing entries read as zero.
class EdgeControl {
 public:
  void set(int i, int j, int s, TimeSeries series) {
    series_[{i, j, s}] = std::move(series);
  }

  double eval(int i, int j, int s, double t) const {
    auto it = series_.find({i, j, s});
    return it == series_.end() ? 0.0 : it->second(t);
  }

  const std::map<std::tuple<int, int, int>, TimeSeries>& entries() const { return series_; }

 private:
  std::map<std::tuple<int, int, int>, TimeSeries> series_;
};

/// Common control for the bracket-extended dynamics: per basis index i a sum
/// of monomial terms u_{i,p}(t) * p(sigma). Every emitted exponent vector
/// must have total degree >= min_degree (one more than the graph diameter in
/// the synthesis pipeline).
class MonomialControl {
 public:
  struct Term {
    std::vector<int> exponents;
    TimeSeries coefficient;
  };

  MonomialControl() = default;
  MonomialControl(int basis_size, int min_degree)
      : min_degree_(min_degree), terms_(basis_size) {}

  int basis_size() const { return static_cast<int>(terms_.size()); }
  int min_degree() const { return min_degree_; }

  void add_term(int i, std::vector<int> exponents, TimeSeries coefficient) {
    if (monomial_degree(exponents) < min_degree_)
      throw std::invalid_argument("monomial control: term degree below the required minimum");
    terms_.at(i).push_back({std::move(exponents), std::move(coefficient)});
  }

  const std::vector<Term>& terms(int i) const { return terms_.at(i); }

  /// Coefficient of basis element i at (t, sigma).
  double coefficient(int i, double t, const ParameterizationSet& p, const Sigma& sigma) const {
    double v = 0;
    for (const Term& term : terms_.at(i))
      v += term.coefficient(t) * eval_monomial(term.exponents, p, sigma);
    return v;
  }

  /// Monomial values are time-independent; precompute them per sample.
  std::vector<std::vector<std::vector<double>>> monomial_table(
      const ParameterizationSet& p, const SigmaGrid& grid) const {
    std::vector<std::vector<std::vector<double>>> table(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      table[i].resize(grid.size());
      for (std::size_t m = 0; m < grid.size(); ++m)
        for (const Term& term : terms_[i])
          table[i][m].push_back(eval_monomial(term.exponents, p, grid.samples[m]));
    }
    return table;
  }

  double coefficient_from_table(int i, double t,
                                const std::vector<std::vector<std::vector<double>>>& table,
                                std::size_t sample) const {
    double v = 0;
    const auto& values = table[i][sample];
    const auto& terms = terms_[i];
    for (std::size_t k = 0; k < terms.size(); ++k)
      v += terms[k].coefficient(t) * values[k];
    return v;
  }

 private:
  int min_degree_ = 0;
  std::vector<std::vector<Term>> terms_;
};

/// Sampled ensemble: one configuration per parameter sample.
struct EnsembleState {
  SigmaGrid grid;
  std::vector<Configuration> configs;
  double t = 0;

  void validate() const {
    if (configs.size() != grid.size())
      throw ConfigError("ensemble state: one configuration per sample required");
    for (const auto& c : configs) {
      if (c.rows() != configs.front().rows() || c.cols() != configs.front().cols())
        throw ConfigError("ensemble state: all configurations must share (N, n)");
      if (!c.allFinite()) throw ConfigError("ensemble state: non-finite configuration");
    }
  }
};

/// Right-hand side of the formation dynamics: rows of X move along relative
/// positions of out-neighbors, weighted by control times parameterization.
inline Eigen::MatrixXd vector_field_original(const Configuration& x, const Digraph& g,
                                             const ParameterizationSet& p, const Sigma& sigma,
                                             const EdgeControl& u, double t) {
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (auto [i, j] : g.edges()) {
    for (int s = 0; s < p.size(); ++s) {
      const double c = u.eval(i, j, s, t) * p.eval(s, sigma);
      if (c != 0.0) dx.row(i - 1) += c * (x.row(j - 1) - x.row(i - 1));
    }
  }
  return dx;
}

/// Right-hand side of the bracket-extended dynamics
/// sum_i (sum_p u_{i,p}(t) p(sigma)) A_i X.
inline Eigen::MatrixXd vector_field_extended(const Configuration& x,
                                             const std::vector<IntMatrix>& basis,
                                             const ParameterizationSet& p, const Sigma& sigma,
                                             const MonomialControl& mc, double t) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < mc.basis_size(); ++i) {
    const double c = mc.coefficient(i, t, p, sigma);
    if (c != 0.0) gen += c * to_dense(basis[static_cast<std::size_t>(i)]);
  }
  return gen * x;
}

/// Time series of ensemble states on the integrator grid.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<Configuration>> states;  // [time][sample]
  SigmaGrid grid;

  const Configuration& at(std::size_t time_index, std::size_t sample) const {
    return states[time_index][sample];
  }
};

/// Per-sample right-hand side: (t, sample index, X) -> dX/dt.
using FieldFn = std::function<Eigen::MatrixXd(double, std::size_t, const Eigen::MatrixXd&)>;

namespace detail {

inline void rk4_step(const FieldFn& f, double t, double dt, std::size_t m, Configuration& x) {
  const Eigen::MatrixXd k1 = f(t, m, x);
  const Eigen::MatrixXd k2 = f(t + dt / 2, m, x + (dt / 2) * k1);
  const Eigen::MatrixXd k3 = f(t + dt / 2, m, x + (dt / 2) * k2);
  const Eigen::MatrixXd k4 = f(t + dt, m, x + dt * k3);
  x += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

inline void parallel_over_samples(std::size_t count, int jobs,
                                  const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t m = 0; m < count; ++m) body(m);
    return;
  }
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t m = next.fetch_add(1); m < count; m = next.fetch_add(1)) body(m);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Classical fixed-step 4th-order Runge-Kutta over [0, T] with right-
/// continuous graph switching: segment k's field is used on every step whose
/// left endpoint lies in segment k. Switch times must land on the step grid
/// (within rounding). Samples integrate independently, so worker count does
/// not change the result bitwise.
inline Trajectory integrate(const EnsembleState& init, const std::vector<FieldFn>& segment_fields,
                            const GraphSchedule& schedule, double dt, double T, int jobs = 1) {
  init.validate();
  if (segment_fields.size() != schedule.segments().size())
    throw ConfigError("integrate: one field per schedule segment required");
  if (!(dt > 0)) throw ConfigError("integrate: dt must be positive");
  if (T < 0) throw ConfigError("integrate: horizon must be nonnegative");
  if (T > schedule.horizon() * (1 + 1e-12))
    throw ConfigError("integrate: horizon exceeds the schedule");
  for (std::size_t k = 0; k < schedule.segments().size(); ++k) {
    const double len = std::min(schedule.segment_end(k), T) - schedule.segments()[k].first;
    if (len <= 0) continue;
    const double steps = len / dt;
    if (std::abs(steps - std::round(steps)) > 1e-6)
      throw ConfigError("integrate: dt must divide every segment length");
  }

  const auto steps_total = static_cast<std::size_t>(std::llround(T / dt));
  Trajectory traj;
  traj.grid = init.grid;
  traj.times.resize(steps_total + 1);
  for (std::size_t q = 0; q <= steps_total; ++q) traj.times[q] = static_cast<double>(q) * dt;
  traj.states.assign(steps_total + 1, init.configs);

  std::string failure;
  std::mutex failure_mutex;
  detail::parallel_over_samples(
      init.grid.size(), jobs, [&](std::size_t m) {
        Configuration x = init.configs[m];
        for (std::size_t q = 0; q < steps_total; ++q) {
          const double t = traj.times[q];
          const std::size_t seg = schedule.segment_index_at(std::min(t, schedule.horizon()));
          detail::rk4_step(segment_fields[seg], t, dt, m, x);
          if (!x.allFinite()) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (failure.empty())
              failure = "integrate: state blew up at t=" + std::to_string(traj.times[q + 1]) +
                        ", sample " + std::to_string(m);
            return;
          }
          traj.states[q + 1][m] = x;
        }
      });
  if (!failure.empty()) throw NumericError(failure);
  return traj;
}

/// Convenience wrappers tying the two dynamics to their control objects.
inline Trajectory integrate_original(const EnsembleState& init, const GraphSchedule& schedule,
                                     const ParameterizationSet& p, const EdgeControl& u,
                                     double dt, double T, int jobs = 1) {
  std::vector<FieldFn> fields;
  for (const auto& [t0, g] : schedule.segments()) {
    const Digraph* graph = &g;
    fields.push_back([&init, &p, &u, graph](double t, std::size_t m, const Eigen::MatrixXd& x) {
      return vector_field_original(x, *graph, p, init.grid.samples[m], u, t);
    });
  }
  return integrate(init, fields, schedule, dt, T, jobs);
}

inline Trajectory integrate_extended(const EnsembleState& init, const GraphSchedule& schedule,
                                     const ParameterizationSet& p,
                                     const std::vector<std::vector<IntMatrix>>& segment_bases,
                                     const std::vector<MonomialControl>& segment_controls,
                                     double dt, double T, int jobs = 1) {
  if (segment_bases.size() != schedule.segments().size() ||
      segment_controls.size() != schedule.segments().size())
    throw ConfigError("integrate: one basis and control per segment required");
  std::vector<FieldFn> fields;
  std::vector<std::vector<std::vector<std::vector<double>>>> tables;
  for (std::size_t k = 0; k < segment_controls.size(); ++k)
    tables.push_back(segment_controls[k].monomial_table(p, init.grid));
  for (std::size_t k = 0; k < segment_controls.size(); ++k) {
    const auto* basis = &segment_bases[k];
    const auto* mc = &segment_controls[k];
    const auto* table = &tables[k];
    fields.push_back([basis, mc, table](double t, std::size_t m, const Eigen::MatrixXd& x) {
      const int n = static_cast<int>(x.rows());
      Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < mc->basis_size(); ++i) {
        const double c = mc->coefficient_from_table(i, t, *table, m);
        if (c != 0.0) gen += c * to_dense((*basis)[static_cast<std::size_t>(i)]);
      }
      return Eigen::MatrixXd(gen * x);
    });
  }
  return integrate(init, fields, schedule, dt, T, jobs);
}

/// Matrix exponential by plain power series; the independent reference for
/// frozen-control trajectories at desk scale.
inline Eigen::MatrixXd matrix_exponential_series(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k < 200; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-300) break;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  return sum;
}

}  // namespace ensform
