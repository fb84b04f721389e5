#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "wbg/errors.hpp"

namespace wbg {

struct BracketedRoot {
  double x;
  double residual;  // f(x)
  double lo;        // final bracket
  double hi;
  int iterations;
};

struct RootOptions {
  double f_tol = 1e-12;  // stop once |f(x)| <= f_tol
  double x_tol = 1e-12;  // or once the bracket is this narrow (0 disables)
  int max_iterations = 400;
};

namespace detail {

inline bool opposite_signs(double fa, double fb) { return (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0); }

// Bisection with an interior acceleration step. `step` proposes the next
// iterate from the current best point (Newton or secant); a proposal outside
// the open bracket, or one that failed to halve the bracket last time, is
// replaced by the midpoint.
template <class F, class Step>
BracketedRoot safeguarded_bisection(F&& f, double lo, double hi, const RootOptions& opt, Step&& step) {
  if (!(lo < hi)) throw BracketError("find_root_bracketed: need lo < hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, flo, lo, hi, 0};
  if (fhi == 0.0) return {hi, fhi, lo, hi, 0};
  if (!opposite_signs(flo, fhi)) {
    throw BracketError("find_root_bracketed: f has the same sign at both endpoints [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }

  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::abs(flo) < std::abs(fhi) ? flo : fhi;
  bool force_bisect = false;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    const double width = hi - lo;
    double x = 0.5 * (lo + hi);
    if (!force_bisect) {
      const double proposal = step(best_x, best_f, lo, flo, hi, fhi);
      if (std::isfinite(proposal) && proposal > lo && proposal < hi) x = proposal;
    }
    if (x <= lo || x >= hi) {
      // Bracket is down to adjacent doubles.
      return {best_x, best_f, lo, hi, iter};
    }
    const double fx = f(x);
    if (std::abs(fx) < std::abs(best_f)) {
      best_x = x;
      best_f = fx;
    }
    if (fx == 0.0) return {x, fx, lo, hi, iter};
    if (opposite_signs(flo, fx)) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    if (std::abs(best_f) <= opt.f_tol) return {best_x, best_f, lo, hi, iter};
    if (opt.x_tol > 0.0 && hi - lo <= opt.x_tol) return {best_x, best_f, lo, hi, iter};
    force_bisect = (hi - lo) > 0.5 * width;
  }
  return {best_x, best_f, lo, hi, opt.max_iterations};
}

}  // namespace detail

/// Root of f in [lo, hi] given a sign change, using secant steps inside a bisection safeguard.
template <class F>
BracketedRoot find_root_bracketed(F&& f, double lo, double hi, const RootOptions& opt) {
  auto secant = [](double, double, double a, double fa, double b, double fb) {
    return b - fb * (b - a) / (fb - fa);
  };
  return detail::safeguarded_bisection(f, lo, hi, opt, secant);
}

template <class F>
BracketedRoot find_root_bracketed(F&& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw DomainError("find_root_bracketed: tol must be > 0");
  return find_root_bracketed(std::forward<F>(f), lo, hi, RootOptions{tol, tol});
}

/// As above, with Newton steps from the best point so far; df is the derivative of f.
template <class F, class DF>
BracketedRoot find_root_bracketed_newton(F&& f, DF&& df, double lo, double hi, const RootOptions& opt) {
  auto newton = [&df](double x, double fx, double, double, double, double) {
    const double slope = df(x);
    return slope != 0.0 ? x - fx / slope : std::nan("");
  };
  return detail::safeguarded_bisection(f, lo, hi, opt, newton);
}

}  // namespace wbg
