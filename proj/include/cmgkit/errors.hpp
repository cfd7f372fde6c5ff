#pragma once

#include <stdexcept>

namespace cmg {

// A point fell outside a chart's valid domain, or the metric there is
// numerically singular (condition number above the chart limit).
struct chart_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A jet operation was evaluated at a singular point of the elementary
// function (division by a jet with zero constant term, log of a
// nonpositive value, ...).
struct jet_domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A degree computation could not certify an integer (field too close to
// zero on the sampling sphere, or angular resolution exhausted).
struct index_inconclusive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cmg
