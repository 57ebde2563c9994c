#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "ensform/errors.hpp"

namespace ensform {

/// A point of the parameter box (dimension 1 or 2 at desk scale).
using Sigma = Eigen::VectorXd;

/// Finite sample grid standing in for the parameter space.
struct SigmaGrid {
  std::vector<Sigma> samples;

  static SigmaGrid uniform_1d(double lo, double hi, int count) {
    if (count < 1) throw ConfigError("sigma grid: needs at least one sample");
    SigmaGrid g;
    for (int k = 0; k < count; ++k) {
      Sigma s(1);
      s(0) = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
      g.samples.push_back(s);
    }
    return g;
  }

  static SigmaGrid box_2d(double lo0, double hi0, int count0, double lo1, double hi1,
                          int count1) {
    if (count0 < 1 || count1 < 1) throw ConfigError("sigma grid: needs at least one sample");
    SigmaGrid g;
    for (int a = 0; a < count0; ++a)
      for (int b = 0; b < count1; ++b) {
        Sigma s(2);
        s(0) = count0 == 1 ? lo0 : lo0 + (hi0 - lo0) * a / (count0 - 1);
        s(1) = count1 == 1 ? lo1 : lo1 + (hi1 - lo1) * b / (count1 - 1);
        g.samples.push_back(s);
      }
    return g;
  }

  std::size_t size() const { return samples.size(); }
};

/// Evaluable scalar function of the parameter. The built-in kinds cover the
/// shapes used in experiments: constants, affine maps, univariate
/// polynomials in one coordinate, and exponentials of affine maps.
class RhoFunction {
 public:
  enum class Kind { Constant, Affine, Polynomial, Exponential };

  static RhoFunction constant(double c) {
    RhoFunction f;
    f.kind_ = Kind::Constant;
    f.offset_ = c;
    return f;
  }

  static RhoFunction affine(double offset, Eigen::VectorXd slope) {
    RhoFunction f;
    f.kind_ = Kind::Affine;
    f.offset_ = offset;
    f.slope_ = std::move(slope);
    return f;
  }

  /// c0 + c1 s + c2 s^2 + ... in coordinate `coord` (0-based) of the parameter.
  static RhoFunction polynomial(int coord, std::vector<double> coeffs) {
    RhoFunction f;
    f.kind_ = Kind::Polynomial;
    f.coord_ = coord;
    f.coeffs_ = std::move(coeffs);
    return f;
  }

  static RhoFunction exponential(double offset, Eigen::VectorXd slope) {
    RhoFunction f;
    f.kind_ = Kind::Exponential;
    f.offset_ = offset;
    f.slope_ = std::move(slope);
    return f;
  }

  double operator()(const Sigma& s) const {
    switch (kind_) {
      case Kind::Constant:
        return offset_;
      case Kind::Affine:
        return offset_ + affine_part(s);
      case Kind::Polynomial: {
        if (coord_ >= s.size()) throw ConfigError("rho: coordinate index out of range");
        double v = 0, p = 1;
        for (double c : coeffs_) {
          v += c * p;
          p *= s(coord_);
        }
        return v;
      }
      case Kind::Exponential:
        return std::exp(offset_ + affine_part(s));
    }
    return 0;  // unreachable
  }

  Kind kind() const { return kind_; }
  double offset() const { return offset_; }
  const Eigen::VectorXd& slope() const { return slope_; }
  int coord() const { return coord_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  double affine_part(const Sigma& s) const {
    if (slope_.size() > s.size()) throw ConfigError("rho: slope dimension exceeds parameter");
    double v = 0;
    for (int k = 0; k < slope_.size(); ++k) v += slope_(k) * s(k);
    return v;
  }

  Kind kind_ = Kind::Constant;
  double offset_ = 0;
  Eigen::VectorXd slope_;
  int coord_ = 0;
  std::vector<double> coeffs_;
};

/// The functions rho_1..rho_r together with the index of the designated
/// everywhere-nonzero one (0-based).
class ParameterizationSet {
 public:
  ParameterizationSet(std::vector<RhoFunction> rho, int nonzero_index)
      : rho_(std::move(rho)), nonzero_(nonzero_index) {
    if (rho_.empty()) throw ConfigError("parameterization: needs at least one function");
    if (nonzero_ < 0 || nonzero_ >= static_cast<int>(rho_.size()))
      throw ConfigError("parameterization: nonzero index out of range");
  }

  int size() const { return static_cast<int>(rho_.size()); }
  int nonzero_index() const { return nonzero_; }
  const RhoFunction& function(int s) const { return rho_.at(s); }
  double eval(int s, const Sigma& sigma) const { return rho_.at(s)(sigma); }

  /// The designated function must be nonzero at every grid sample.
  void require_nonzero_on(const SigmaGrid& grid) const {
    for (std::size_t m = 0; m < grid.samples.size(); ++m)
      if (eval(nonzero_, grid.samples[m]) == 0.0)
        throw HypothesisError("parameterization: designated function vanishes at sample " +
                              std::to_string(m));
  }

 private:
  std::vector<RhoFunction> rho_;
  int nonzero_;
};

struct SeparationReport {
  struct PairWitness {
    int a = 0, b = 0;      // sample indices
    int witness = -1;      // function index separating them, -1 if none
  };
  bool separated = true;
  std::vector<PairWitness> pairs;
};

/// For each distinct pair of grid samples, the first function whose values
/// differ by more than tol; the report lists unseparated pairs when the set
/// fails to separate points on the grid.
inline SeparationReport check_separation(const ParameterizationSet& p, const SigmaGrid& grid,
                                         double tol = 1e-12) {
  SeparationReport rep;
  for (std::size_t a = 0; a < grid.samples.size(); ++a)
    for (std::size_t b = a + 1; b < grid.samples.size(); ++b) {
      SeparationReport::PairWitness w{static_cast<int>(a), static_cast<int>(b), -1};
      for (int s = 0; s < p.size(); ++s)
        if (std::abs(p.eval(s, grid.samples[a]) - p.eval(s, grid.samples[b])) > tol) {
          w.witness = s;
          break;
        }
      if (w.witness < 0) rep.separated = false;
      rep.pairs.push_back(w);
    }
  return rep;
}

/// Product of rho_s(sigma)^(k_s). A negative exponent is admitted only on
/// the designated everywhere-nonzero function.
inline double eval_monomial(const std::vector<int>& exponents, const ParameterizationSet& p,
                            const Sigma& sigma) {
  if (static_cast<int>(exponents.size()) != p.size())
    throw std::invalid_argument("monomial: exponent count must match function count");
  double v = 1;
  for (int s = 0; s < p.size(); ++s) {
    int k = exponents[s];
    if (k == 0) continue;
    if (k < 0 && s != p.nonzero_index())
      throw std::invalid_argument(
          "monomial: negative exponent on a function not designated everywhere nonzero");
    v *= std::pow(p.eval(s, sigma), k);
  }
  return v;
}

inline int monomial_degree(const std::vector<int>& exponents) {
  int d = 0;
  for (int k : exponents) d += k;
  return d;
}

/// All exponent vectors over r functions with total degree <= cap, in graded
/// lexicographic order.
inline std::vector<std::vector<int>> monomials_up_to_degree(int r, int cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == r - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      cur[pos] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  for (int deg = 0; deg <= cap; ++deg) rec(rec, 0, deg);
  return out;
}

}  // namespace ensform
