#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace wbg {

/// A published closed form next to an independently computed value.
struct VerificationRecord {
  std::string name;
  double paper_value = 0.0;
  double oracle_value = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;  // abs_diff / max(1, |oracle_value|)
  std::string note;
};

inline VerificationRecord make_record(std::string name, double paper_value, double oracle_value,
                                      std::string note = {}) {
  const double abs_diff = std::abs(paper_value - oracle_value);
  return {std::move(name), paper_value, oracle_value, abs_diff,
          abs_diff / std::max(1.0, std::abs(oracle_value)), std::move(note)};
}

/// Absolute tolerance for |values| <= 1, relative above.
inline bool close_abs_or_rel(double value, double reference, double tol) {
  return std::abs(value - reference) <= tol * std::max(1.0, std::abs(reference));
}

}  // namespace wbg
