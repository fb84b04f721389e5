#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wbg {

/// Value, gradient and Hessian of a scalar function of N variables,
/// propagated exactly through arithmetic, exp and log.
template <std::size_t N>
struct Jet2 {
  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, N * N> h{};

  static Jet2 constant(double value) {
    Jet2 out;
    out.v = value;
    return out;
  }

  static Jet2 variable(double value, std::size_t index) {
    Jet2 out;
    out.v = value;
    out.g[index] = 1.0;
    return out;
  }

  double hess(std::size_t i, std::size_t j) const { return h[i * N + j]; }

  // Chain rule for a scalar function with derivatives d1, d2 at v.
  Jet2 chain(double value, double d1, double d2) const {
    Jet2 out;
    out.v = value;
    for (std::size_t i = 0; i < N; ++i) out.g[i] = d1 * g[i];
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) out.h[i * N + j] = d1 * h[i * N + j] + d2 * g[i] * g[j];
    }
    return out;
  }

  Jet2 operator-() const { return chain(-v, -1.0, 0.0); }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) g[i] += o.g[i];
    for (std::size_t i = 0; i < N * N; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) { return *this += -o; }
  Jet2& operator*=(const Jet2& o) {
    Jet2 out;
    out.v = v * o.v;
    for (std::size_t i = 0; i < N; ++i) out.g[i] = g[i] * o.v + v * o.g[i];
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        out.h[i * N + j] = h[i * N + j] * o.v + v * o.h[i * N + j] + g[i] * o.g[j] + o.g[i] * g[j];
      }
    }
    return *this = out;
  }
  Jet2& operator/=(const Jet2& o) {
    const double inv = 1.0 / o.v;
    return *this *= o.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  Jet2& operator+=(double c) { v += c; return *this; }
  Jet2& operator-=(double c) { v -= c; return *this; }
  Jet2& operator*=(double c) { return *this = chain(v * c, c, 0.0); }
  Jet2& operator/=(double c) { return *this *= 1.0 / c; }

  friend Jet2 operator+(Jet2 x, const Jet2& y) { return x += y; }
  friend Jet2 operator-(Jet2 x, const Jet2& y) { return x -= y; }
  friend Jet2 operator*(Jet2 x, const Jet2& y) { return x *= y; }
  friend Jet2 operator/(Jet2 x, const Jet2& y) { return x /= y; }
  friend Jet2 operator+(Jet2 x, double c) { return x += c; }
  friend Jet2 operator+(double c, Jet2 x) { return x += c; }
  friend Jet2 operator-(Jet2 x, double c) { return x -= c; }
  friend Jet2 operator-(double c, const Jet2& x) { return -x + c; }
  friend Jet2 operator*(Jet2 x, double c) { return x *= c; }
  friend Jet2 operator*(double c, Jet2 x) { return x *= c; }
  friend Jet2 operator/(Jet2 x, double c) { return x /= c; }
  friend Jet2 operator/(double c, const Jet2& x) { return Jet2::constant(c) / x; }

  friend Jet2 exp(const Jet2& x) {
    const double e = std::exp(x.v);
    return x.chain(e, e, e);
  }
  friend Jet2 log(const Jet2& x) {
    const double inv = 1.0 / x.v;
    return x.chain(std::log(x.v), inv, -inv * inv);
  }
};

}  // namespace wbg
