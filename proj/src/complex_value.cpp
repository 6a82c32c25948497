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

#include "stochdd/complex_value.hpp"

#include <cmath>

#include "stochdd/errors.hpp"

namespace stochdd {

namespace {

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

ValueTable::ValueTable() : buckets_(std::size_t{1} << kBucketsLog2) {
  entries_.reserve(1024);
  seed();
}

void ValueTable::seed() {
  insert(1.0, static_cast<std::int64_t>(std::llround(1.0 / kTolerance)));
  insert(-1.0, static_cast<std::int64_t>(std::llround(-1.0 / kTolerance)));
}

void ValueTable::insert(double x, std::int64_t key) {
  const std::size_t b = mix64(static_cast<std::uint64_t>(key)) & kBucketMask;
  Bucket& bucket = buckets_[b];
  const std::int32_t head = bucket.epoch == epoch_ ? bucket.head : -1;
  entries_.push_back(Entry{x, head});
  bucket.head = static_cast<std::int32_t>(entries_.size() - 1);
  bucket.epoch = epoch_;
}

double ValueTable::canon(double x) {
  if (!std::isfinite(x)) {
    throw NumericDegeneracyError("non-finite decision-diagram weight");
  }
  const double ax = std::abs(x);
  if (ax < kTolerance) {
    return 0.0;
  }
  if (ax > kMaxMergeable) {
    return x;
  }
  const auto key = static_cast<std::int64_t>(std::llround(x / kTolerance));
  for (std::int64_t k : {key, key - 1, key + 1}) {
    const std::size_t b = mix64(static_cast<std::uint64_t>(k)) & kBucketMask;
    const Bucket& bucket = buckets_[b];
    if (bucket.epoch != epoch_) {
      continue;
    }
    for (std::int32_t i = bucket.head; i >= 0; i = entries_[i].next) {
      if (std::abs(entries_[i].value - x) < kTolerance) {
        return entries_[i].value;
      }
    }
  }
  insert(x, key);
  return x;
}

void ValueTable::clear() {
  ++epoch_;
  if (epoch_ == 0) {
    // Epoch counter wrapped; stale stamps would look current again.
    for (Bucket& b : buckets_) {
      b = Bucket{};
    }
    epoch_ = 1;
  }
  entries_.clear();
  seed();
}

}  // namespace stochdd
