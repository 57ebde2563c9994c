#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "ensform/errors.hpp"

namespace ensform {

namespace detail {

inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r))
    throw NumericError("integer overflow in exact matrix arithmetic");
  return r;
}

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r))
    throw NumericError("integer overflow in exact matrix arithmetic");
  return r;
}

}  // namespace detail

/// Square matrix with exact 64-bit integer entries and overflow-checked
/// arithmetic. Commutators of edge generators grow entry magnitudes by at
/// most a factor 3 per bracket depth, so 64 bits cover every enumeration
/// depth the caps admit; an overflow past that raises NumericError instead
/// of wrapping.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {
    if (n <= 0) throw std::invalid_argument("IntMatrix: dimension must be positive");
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  int size() const { return n_; }

  long long& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  long long operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  const std::vector<long long>& entries() const { return a_; }

  bool is_zero() const {
    for (long long v : a_)
      if (v != 0) return false;
    return true;
  }

  long long trace() const {
    long long t = 0;
    for (int i = 0; i < n_; ++i) t = detail::checked_add(t, (*this)(i, i));
    return t;
  }

  bool has_zero_row_sums() const {
    for (int i = 0; i < n_; ++i) {
      long long s = 0;
      for (int j = 0; j < n_; ++j) s = detail::checked_add(s, (*this)(i, j));
      if (s != 0) return false;
    }
    return true;
  }

  bool has_zero_column_sums() const {
    for (int j = 0; j < n_; ++j) {
      long long s = 0;
      for (int i = 0; i < n_; ++i) s = detail::checked_add(s, (*this)(i, j));
      if (s != 0) return false;
    }
    return true;
  }

  IntMatrix operator-() const {
    IntMatrix r(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = -a_[k];
    return r;
  }

  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_size(b);
    IntMatrix r(a.n_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = detail::checked_add(a.a_[k], b.a_[k]);
    return r;
  }

  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_size(b);
    IntMatrix r(a.n_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = detail::checked_add(a.a_[k], -b.a_[k]);
    return r;
  }

  friend IntMatrix operator*(long long s, const IntMatrix& a) {
    IntMatrix r(a.n_);
    for (std::size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = detail::checked_mul(s, a.a_[k]);
    return r;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    a.require_same_size(b);
    const int n = a.n_;
    IntMatrix r(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const long long aik = a(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < n; ++j)
          r(i, j) = detail::checked_add(r(i, j), detail::checked_mul(aik, b(k, j)));
      }
    return r;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.n_ == b.n_ && a.a_ == b.a_;
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ull;  // FNV-1a
    for (long long v : a_) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h ^ static_cast<std::size_t>(n_);
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < n_; ++i) {
      os << (i ? "; " : "");
      for (int j = 0; j < n_; ++j) os << (j ? "," : "") << (*this)(i, j);
    }
    os << "]";
    return os.str();
  }

 private:
  void require_same_size(const IntMatrix& other) const {
    if (n_ != other.n_) throw std::invalid_argument("IntMatrix: dimension mismatch");
  }

  int n_ = 0;
  std::vector<long long> a_;
};

/// Matrix commutator AB - BA, exact.
inline IntMatrix commutator(const IntMatrix& a, const IntMatrix& b) {
  return a * b - b * a;
}

struct IntMatrixHash {
  std::size_t operator()(const IntMatrix& m) const { return m.hash(); }
};

/// Deduplicated collection of same-dimension exact matrices. Iteration order
/// is insertion order, which downstream enumeration contracts rely on.
class MatrixSet {
 public:
  MatrixSet() = default;

  /// Returns true when the element was new.
  bool insert(const IntMatrix& m) {
    if (!elems_.empty() && m.size() != dimension())
      throw std::invalid_argument("MatrixSet: dimension mismatch");
    if (lookup_.count(m)) return false;
    lookup_.insert(m);
    elems_.push_back(m);
    return true;
  }

  bool contains(const IntMatrix& m) const { return lookup_.count(m) > 0; }

  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  int dimension() const { return elems_.empty() ? 0 : elems_.front().size(); }

  const std::vector<IntMatrix>& elements() const { return elems_; }
  const IntMatrix& operator[](std::size_t k) const { return elems_[k]; }

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  MatrixSet negated() const {
    MatrixSet out;
    for (const auto& m : elems_) out.insert(-m);
    return out;
  }

  bool set_equals(const MatrixSet& other) const {
    if (size() != other.size()) return false;
    for (const auto& m : elems_)
      if (!other.contains(m)) return false;
    return true;
  }

 private:
  std::vector<IntMatrix> elems_;
  std::unordered_set<IntMatrix, IntMatrixHash> lookup_;
};

}  // namespace ensform
