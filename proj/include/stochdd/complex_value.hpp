// Copyright 2026 The stochdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace stochdd {

/// Complex edge weight / amplitude. Plain value type; weights stored inside
/// decision-diagram nodes are canonicalized through a ValueTable so that
/// equal-within-tolerance values are bitwise identical and can be compared
/// and hashed as raw doubles.
struct ComplexValue {
  double re = 0.0;
  double im = 0.0;

  [[nodiscard]] constexpr bool exactly_zero() const noexcept {
    return re == 0.0 && im == 0.0;
  }
  [[nodiscard]] constexpr bool exactly_one() const noexcept {
    return re == 1.0 && im == 0.0;
  }
  /// Squared magnitude |v|^2.
  [[nodiscard]] constexpr double mag2() const noexcept {
    return re * re + im * im;
  }
  [[nodiscard]] std::complex<double> to_std() const noexcept {
    return {re, im};
  }

  constexpr bool operator==(const ComplexValue&) const noexcept = default;
};

constexpr ComplexValue operator+(ComplexValue a, ComplexValue b) noexcept {
  return {a.re + b.re, a.im + b.im};
}
constexpr ComplexValue operator-(ComplexValue a, ComplexValue b) noexcept {
  return {a.re - b.re, a.im - b.im};
}
constexpr ComplexValue operator-(ComplexValue a) noexcept {
  return {-a.re, -a.im};
}
constexpr ComplexValue operator*(ComplexValue a, ComplexValue b) noexcept {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
constexpr ComplexValue operator*(ComplexValue a, double s) noexcept {
  return {a.re * s, a.im * s};
}
constexpr ComplexValue conj(ComplexValue a) noexcept { return {a.re, -a.im}; }

/// a / b; b must be nonzero.
constexpr ComplexValue cdiv(ComplexValue a, ComplexValue b) noexcept {
  const double d = b.mag2();
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

inline bool approx_equal(ComplexValue a, ComplexValue b, double tol) noexcept {
  return std::abs(a.re - b.re) <= tol && std::abs(a.im - b.im) <= tol;
}

/// Uniquing table for the real components of edge weights.
///
/// Lookup is idempotent: inserting a value within kTolerance of an existing
/// entry returns the existing entry, so weights that survive canonicalization
/// are bitwise comparable. Magnitudes below kTolerance collapse to exact 0;
/// +1/-1 are pre-seeded so near-unit results snap to exact units.
///
/// clear() is O(1): buckets carry an epoch stamp and entries live in a bump
/// vector, which lets a simulation run drop the whole table cheaply.
class ValueTable {
 public:
  static constexpr double kTolerance = 1e-13;

  ValueTable();

  /// Canonical representative of x (within kTolerance).
  double canon(double x);
  ComplexValue canon(ComplexValue v) { return {canon(v.re), canon(v.im)}; }

  void clear();
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Bucket {
    std::uint32_t epoch = 0;
    std::int32_t head = -1;
  };
  struct Entry {
    double value;
    std::int32_t next;
  };

  void seed();
  void insert(double x, std::int64_t key);

  static constexpr std::size_t kBucketsLog2 = 16;
  static constexpr std::size_t kBucketMask = (std::size_t{1} << kBucketsLog2) - 1;
  // Beyond this magnitude the grid key would overflow; such values never
  // appear as canonical weights and are passed through unmerged.
  static constexpr double kMaxMergeable = 1e5;

  std::vector<Bucket> buckets_;
  std::vector<Entry> entries_;
  std::uint32_t epoch_ = 1;
};

}  // namespace stochdd
