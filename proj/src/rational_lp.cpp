#include "rational_lp.hpp"

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace stellar::detail {

namespace {

struct Overflow {};

/// Exact rational over 64-bit integers.  Every operation computes in 128 bits
/// and throws Overflow when the reduced result does not fit; the caller then
/// redoes the computation with arbitrary precision.
class SmallRational {
 public:
  SmallRational() = default;
  SmallRational(long n) : num_(n) {}  // NOLINT: implicit like the big type

  friend SmallRational operator+(const SmallRational& a, const SmallRational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend SmallRational operator-(const SmallRational& a, const SmallRational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend SmallRational operator*(const SmallRational& a, const SmallRational& b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend SmallRational operator/(const SmallRational& a, const SmallRational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  SmallRational& operator+=(const SmallRational& b) { return *this = *this + b; }
  SmallRational& operator-=(const SmallRational& b) { return *this = *this - b; }
  SmallRational& operator/=(const SmallRational& b) { return *this = *this / b; }

  friend bool operator==(const SmallRational& a, const SmallRational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const SmallRational& a, const SmallRational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<(const SmallRational& a, int b) { return a < SmallRational(b); }
  friend bool operator<=(const SmallRational& a, int b) { return !(SmallRational(b) < a); }
  friend bool operator==(const SmallRational& a, int b) { return a == SmallRational(b); }

 private:
  static SmallRational make(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) throw Overflow{};
    SmallRational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Phase-one simplex with Bland's rule on a dense tableau.
template <class Rational>
bool phase_one(const std::vector<LinearRow>& rows, const std::vector<long>& rhs, std::size_t variables) {
  const std::size_t m = rows.size();
  const std::size_t n = variables + m;  // structural variables then one artificial per row
  // Dense tableau: m constraint rows plus the phase-one objective row; the
  // last column is the right-hand side.
  std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(n + 1));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const long sign = rhs[i] < 0 ? -1 : 1;
    for (const auto& [var, coeff] : rows[i]) t[i][var] += Rational(sign * coeff);
    t[i][variables + i] = Rational(1);
    t[i][n] = Rational(sign * rhs[i]);
    basis[i] = variables + i;
  }
  // Objective: minimise the sum of artificials, expressed in non-basic terms.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (j >= variables && j < n) continue;
      t[m][j] -= t[i][j];
    }
  }
  while (true) {
    // Bland: entering variable = smallest index with negative reduced cost.
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (t[m][j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == n) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][n] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase one
    const Rational pivot = t[leave][enter];
    for (auto& x : t[leave]) {
      if (!(x == 0)) x /= pivot;
    }
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational factor = t[i][enter];
      for (std::size_t j = 0; j <= n; ++j) {
        if (!(t[leave][j] == 0)) t[i][j] -= factor * t[leave][j];
      }
    }
    basis[leave] = enter;
  }
  return t[m][n] == 0;
}

}  // namespace

bool feasible(const std::vector<LinearRow>& rows, const std::vector<long>& rhs, std::size_t variables) {
  try {
    return phase_one<SmallRational>(rows, rhs, variables);
  } catch (const Overflow&) {
    return phase_one<boost::multiprecision::cpp_rational>(rows, rhs, variables);
  }
}

}  // namespace stellar::detail
