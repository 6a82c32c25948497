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

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stochdd/circuit.hpp"
#include "stochdd/complex_value.hpp"
#include "stochdd/rng.hpp"

namespace stochdd {

class RandomStream;
class DDArena;
class StateDD;
class MatrixDD;

/// Weighted edge. A null node is the terminal; an exactly-zero weight on a
/// terminal edge is the canonical zero stub.
template <class NodeT>
struct Edge {
  NodeT* node = nullptr;
  ComplexValue w{};

  [[nodiscard]] bool is_terminal() const noexcept { return node == nullptr; }
  [[nodiscard]] bool is_zero() const noexcept {
    return node == nullptr && w.exactly_zero();
  }
  static Edge zero() noexcept { return {}; }
  static Edge terminal(ComplexValue weight) noexcept {
    return {nullptr, weight};
  }
  bool operator==(const Edge&) const noexcept = default;
};

/// Vector node: binary split on one qubit. `level` counts distance above the
/// terminal (bottom qubit = 1); a node at level l in an n-qubit diagram
/// splits on qubit n - l, so the root splits on q0, the most significant.
struct VecNode {
  std::array<Edge<VecNode>, 2> succ{};
  std::uint32_t level = 0;
  std::uint32_t mark = 0;
  VecNode* next = nullptr;  // unique-table chain / free list
};

/// Matrix node: quadrant split (indices: 0=upper-left, 1=upper-right,
/// 2=lower-left, 3=lower-right).
struct MatNode {
  std::array<Edge<MatNode>, 4> succ{};
  std::uint32_t level = 0;
  std::uint32_t mark = 0;
  MatNode* next = nullptr;
};

using VecEdge = Edge<VecNode>;
using MatEdge = Edge<MatNode>;

/// Row-major 2x2 complex matrix (u00, u01, u10, u11).
using Mat2 = std::array<ComplexValue, 4>;

namespace detail {

template <class NodeT>
class NodePool {
 public:
  NodeT* allocate() {
    if (free_ != nullptr) {
      NodeT* n = free_;
      free_ = n->next;
      ++in_use_;
      return n;
    }
    if (watermark_ == storage_.size()) {
      storage_.emplace_back();
    }
    ++in_use_;
    return &storage_[watermark_++];
  }
  void release(NodeT* n) noexcept {
    n->next = free_;
    free_ = n;
    --in_use_;
  }
  void reset() noexcept {
    watermark_ = 0;
    free_ = nullptr;
    in_use_ = 0;
  }
  [[nodiscard]] std::size_t in_use() const noexcept { return in_use_; }

 private:
  std::deque<NodeT> storage_;
  std::size_t watermark_ = 0;
  NodeT* free_ = nullptr;
  std::size_t in_use_ = 0;
};

/// Chained hash table enforcing one live node per (level, successor list).
/// clear() is O(1) via epoch stamps on the buckets.
template <class NodeT>
class UniqueTable {
 public:
  UniqueTable() : buckets_(kInitialBuckets) {}

  template <class MakeFn>
  NodeT* lookup_or_create(std::uint32_t level,
                          std::span<const Edge<NodeT>> succ, MakeFn make);

  void clear() noexcept {
    ++epoch_;
    if (epoch_ == 0) {
      for (auto& b : buckets_) b = Bucket{};
      epoch_ = 1;
    }
    count_ = 0;
  }

  [[nodiscard]] std::size_t size() const noexcept { return count_; }

  /// Drops nodes whose mark differs from `keep_mark`, handing them to
  /// `release`. Used by garbage collection.
  template <class ReleaseFn>
  void sweep(std::uint32_t keep_mark, ReleaseFn release);

 private:
  struct Bucket {
    NodeT* head = nullptr;
    std::uint32_t epoch = 0;
  };
  static constexpr std::size_t kInitialBuckets = std::size_t{1} << 16;

  static std::uint64_t hash_node(std::uint32_t level,
                                 std::span<const Edge<NodeT>> succ) noexcept;
  void grow();

  std::vector<Bucket> buckets_;
  std::uint32_t epoch_ = 1;
  std::size_t count_ = 0;
};

/// Fixed-size direct-mapped memoization cache with O(1) invalidation.
/// Lossy by design: a collision overwrites, which can only cost recomputation
/// (cached values are bitwise identical to recomputed ones).
template <class Key, class Value>
class ComputeCache {
 public:
  explicit ComputeCache(std::size_t size_log2 = 16)
      : slots_(std::size_t{1} << size_log2), mask_((std::size_t{1} << size_log2) - 1) {}

  const Value* lookup(const Key& key, std::uint64_t hash) const noexcept {
    const Slot& s = slots_[hash & mask_];
    if (s.epoch == epoch_ && s.key == key) {
      return &s.value;
    }
    return nullptr;
  }
  void store(const Key& key, std::uint64_t hash, const Value& value) noexcept {
    Slot& s = slots_[hash & mask_];
    s.key = key;
    s.value = value;
    s.epoch = epoch_;
  }
  void clear() noexcept {
    ++epoch_;
    if (epoch_ == 0) {
      for (auto& s : slots_) s.epoch = 0;
      epoch_ = 1;
    }
  }

 private:
  struct Slot {
    Key key{};
    Value value{};
    std::uint32_t epoch = 0;
  };
  std::vector<Slot> slots_;
  std::size_t mask_;
  std::uint32_t epoch_ = 1;
};

}  // namespace detail

/// Handle to a canonical state-vector decision diagram. Copyable value
/// handle; the root node is pinned in the owning arena for the handle's
/// lifetime. The arena must outlive all handles.
class StateDD {
 public:
  StateDD() = default;
  StateDD(const StateDD& other);
  StateDD& operator=(const StateDD& other);
  StateDD(StateDD&& other) noexcept;
  StateDD& operator=(StateDD&& other) noexcept;
  ~StateDD();

  [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
  [[nodiscard]] bool is_zero() const noexcept { return root_.is_zero(); }
  [[nodiscard]] DDArena& arena() const noexcept { return *arena_; }
  [[nodiscard]] const VecEdge& root() const noexcept { return root_; }

  /// Identical root edge (same node, bitwise-equal weight). By canonicity
  /// this is structural equality of the represented vectors.
  [[nodiscard]] bool same_root(const StateDD& other) const noexcept {
    return arena_ == other.arena_ && n_ == other.n_ && root_ == other.root_;
  }

 private:
  friend class DDArena;
  StateDD(DDArena* arena, VecEdge root, std::size_t n);

  DDArena* arena_ = nullptr;
  VecEdge root_{};
  std::size_t n_ = 0;
};

/// Handle to a canonical operator (matrix) decision diagram.
class MatrixDD {
 public:
  MatrixDD() = default;
  MatrixDD(const MatrixDD& other);
  MatrixDD& operator=(const MatrixDD& other);
  MatrixDD(MatrixDD&& other) noexcept;
  MatrixDD& operator=(MatrixDD&& other) noexcept;
  ~MatrixDD();

  [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
  [[nodiscard]] DDArena& arena() const noexcept { return *arena_; }
  [[nodiscard]] const MatEdge& root() const noexcept { return root_; }

 private:
  friend class DDArena;
  MatrixDD(DDArena* arena, MatEdge root, std::size_t n);

  DDArena* arena_ = nullptr;
  MatEdge root_{};
  std::size_t n_ = 0;
};

/// Decision-diagram engine: node pools, unique tables (hash consing),
/// compute tables, complex-value uniquing and reference-counted roots with
/// mark-and-release garbage collection.
///
/// Concurrency: an arena is confined to one execution context at a time.
/// Create one per worker; never share. There is no global mutable state.
class DDArena {
 public:
  DDArena() = default;
  DDArena(const DDArena&) = delete;
  DDArena& operator=(const DDArena&) = delete;

  /// Per-run reset: clears unique tables, compute tables, the value table
  /// and node pools in O(1). All handles must have been dropped.
  void reset();

  /// Basis state |bits>; bits[0] is qubit 0, the most significant.
  StateDD make_basis_state(std::size_t n, std::string_view bits);

  /// Builds a state from a dense amplitude vector (size 2^n). Intended for
  /// tests and small reference states; n is capped at 24.
  StateDD make_state_from_amplitudes(std::span<const ComplexValue> amplitudes);

  /// Full 2^n x 2^n operator for a gate, identity on untouched qubits.
  /// Throws UnsupportedGateError for Measure/Barrier and
  /// std::invalid_argument for out-of-range or overlapping operands.
  MatrixDD gate_matrix(const GateOp& op, std::size_t n);

  /// Arbitrary (not necessarily unitary) 2x2 operator embedded at `target`,
  /// identity elsewhere. Used for amplitude-damping Kraus factors.
  MatrixDD single_qubit_operator(const Mat2& u, Qubit target, std::size_t n);

  MatrixDD identity(std::size_t n);

  void collect_garbage();
  void set_compute_tables_enabled(bool enabled);
  void clear_compute_tables();

  [[nodiscard]] std::size_t live_vec_nodes() const noexcept {
    return vec_pool_.in_use();
  }
  [[nodiscard]] std::size_t live_mat_nodes() const noexcept {
    return mat_pool_.in_use();
  }
  ValueTable& values() noexcept { return values_; }

 private:
  friend class StateDD;
  friend class MatrixDD;

  friend StateDD apply_matrix(const MatrixDD& op, const StateDD& state);
  friend StateDD add(const StateDD& a, const StateDD& b);
  friend MatrixDD add(const MatrixDD& a, const MatrixDD& b);
  friend StateDD scale(const StateDD& state, ComplexValue c);
  friend ComplexValue inner_product(const StateDD& a, const StateDD& b);
  friend double norm_squared(const StateDD& state);
  friend std::string measure_all(const StateDD& state, RandomStream& rng);

  // -- node construction ----------------------------------------------------
  VecEdge make_vec_node(std::uint32_t level, std::array<VecEdge, 2> succ);
  MatEdge make_mat_node(std::uint32_t level, std::array<MatEdge, 4> succ);

  // -- handle construction (for the friend operations) -----------------------
  StateDD state_handle(VecEdge root, std::size_t n);
  MatrixDD matrix_handle(MatEdge root, std::size_t n);

  // -- arithmetic kernels ---------------------------------------------------
  VecEdge add_vec(VecEdge a, VecEdge b, std::uint32_t level);
  MatEdge add_mat(MatEdge a, MatEdge b, std::uint32_t level);
  VecEdge mult_mat_vec(MatEdge m, VecEdge v, std::uint32_t level);
  VecEdge mult_nodes(MatNode* m, VecNode* v, std::uint32_t level);
  double mass(const VecEdge& e,
              std::unordered_map<const VecNode*, double>& memo) const;

  MatEdge operator_chain(std::size_t n,
                         const std::vector<std::pair<Qubit, Mat2>>& factors,
                         ComplexValue coeff);

  // -- root pinning / garbage collection ------------------------------------
  void pin(VecNode* node);
  void unpin(VecNode* node);
  void pin(MatNode* node);
  void unpin(MatNode* node);
  void mark_vec(VecNode* node, std::uint32_t mark);
  void mark_mat(MatNode* node, std::uint32_t mark);
  void maybe_collect();

  ValueTable values_;
  detail::NodePool<VecNode> vec_pool_;
  detail::NodePool<MatNode> mat_pool_;
  detail::UniqueTable<VecNode> vec_unique_;
  detail::UniqueTable<MatNode> mat_unique_;

  struct VAddKey {
    VecNode* a;
    ComplexValue wa;
    VecNode* b;
    ComplexValue wb;
    bool operator==(const VAddKey&) const noexcept = default;
  };
  struct MAddKey {
    MatNode* a;
    ComplexValue wa;
    MatNode* b;
    ComplexValue wb;
    bool operator==(const MAddKey&) const noexcept = default;
  };
  struct MultKey {
    MatNode* m;
    VecNode* v;
    bool operator==(const MultKey&) const noexcept = default;
  };
  detail::ComputeCache<VAddKey, VecEdge> vec_add_cache_;
  detail::ComputeCache<MAddKey, MatEdge> mat_add_cache_;
  detail::ComputeCache<MultKey, VecEdge> mult_cache_;
  bool compute_tables_enabled_ = true;

  std::unordered_map<VecNode*, std::uint32_t> vec_roots_;
  std::unordered_map<MatNode*, std::uint32_t> mat_roots_;
  std::uint32_t gc_mark_ = 0;
  std::size_t gc_threshold_ = std::size_t{1} << 20;
};

// -- operations on states (the module's public surface) ----------------------

/// Amplitude <bits|state>: product of the edge weights along the path
/// selected by bits (bits[0] = q0). Canonicalized through the value table.
ComplexValue amplitude(const StateDD& state, std::string_view bits);

/// op * state via memoized recursive traversal; result is
/// normalized-canonical.
StateDD apply_matrix(const MatrixDD& op, const StateDD& state);

/// Elementwise sum.
StateDD add(const StateDD& a, const StateDD& b);
MatrixDD add(const MatrixDD& a, const MatrixDD& b);

/// Multiplies the root weight by c (c of magnitude < tolerance yields the
/// zero edge).
StateDD scale(const StateDD& state, ComplexValue c);

/// <a|b> = sum_i conj(a_i) * b_i, canonicalized through the value table.
ComplexValue inner_product(const StateDD& a, const StateDD& b);

/// Sum |alpha_i|^2 by the memoized recursion |w|^2 * (s_left + s_right).
double norm_squared(const StateDD& state);

/// Samples a bitstring with probability |alpha_bits|^2 by top-down descent;
/// branch probability is |w|^2 * subtree mass / parent mass. Requires the
/// state norm to be within 1e-6 of 1, else throws NumericDegeneracyError.
std::string measure_all(const StateDD& state, RandomStream& rng);

/// Number of non-terminal nodes reachable from the root.
std::size_t node_count(const StateDD& state);
std::size_t node_count(const MatrixDD& op);

/// Dense expansion (index 0 = |00...0>, q0 most significant). n capped at 24.
std::vector<ComplexValue> to_amplitudes(const StateDD& state);

/// Dense matrix entry walk; n capped at 12 for the full matrix.
std::vector<std::vector<ComplexValue>> to_dense_matrix(const MatrixDD& op);

/// Graphviz dot dumps (node label = splitting qubit, edge label = weight).
void write_dot(const StateDD& state, std::ostream& os);
void write_dot(const MatrixDD& op, std::ostream& os);

/// Visits every reachable non-terminal node once (test/debug introspection).
void for_each_node(const StateDD& state,
                   const std::function<void(const VecNode&)>& fn);
void for_each_node(const MatrixDD& op,
                   const std::function<void(const MatNode&)>& fn);

}  // namespace stochdd
