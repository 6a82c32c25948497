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

#include "stochdd/dd.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "stochdd/errors.hpp"

namespace stochdd {

namespace {

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ v);
}

inline std::uint64_t hash_double(double d) noexcept {
  return std::bit_cast<std::uint64_t>(d);
}

inline std::uint64_t hash_value(ComplexValue v) noexcept {
  return hash_combine(hash_double(v.re), hash_double(v.im));
}

inline std::uint64_t hash_ptr(const void* p) noexcept {
  return mix64(reinterpret_cast<std::uintptr_t>(p));
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

// ---------------------------------------------------------------------------
// detail::UniqueTable
// ---------------------------------------------------------------------------

namespace detail {

template <class NodeT>
std::uint64_t UniqueTable<NodeT>::hash_node(
    std::uint32_t level, std::span<const Edge<NodeT>> succ) noexcept {
  std::uint64_t h = mix64(level);
  for (const auto& e : succ) {
    h = hash_combine(h, hash_ptr(e.node));
    h = hash_combine(h, hash_value(e.w));
  }
  return h;
}

template <class NodeT>
template <class MakeFn>
NodeT* UniqueTable<NodeT>::lookup_or_create(std::uint32_t level,
                                            std::span<const Edge<NodeT>> succ,
                                            MakeFn make) {
  if (count_ > 2 * buckets_.size()) {
    grow();
  }
  const std::uint64_t h = hash_node(level, succ);
  Bucket& bucket = buckets_[h & (buckets_.size() - 1)];
  if (bucket.epoch != epoch_) {
    bucket.head = nullptr;
    bucket.epoch = epoch_;
  }
  for (NodeT* n = bucket.head; n != nullptr; n = n->next) {
    if (n->level == level &&
        std::equal(succ.begin(), succ.end(), n->succ.begin())) {
      return n;
    }
  }
  NodeT* n = make();
  n->level = level;
  std::copy(succ.begin(), succ.end(), n->succ.begin());
  n->next = bucket.head;
  bucket.head = n;
  ++count_;
  return n;
}

template <class NodeT>
void UniqueTable<NodeT>::grow() {
  std::vector<Bucket> old = std::move(buckets_);
  buckets_.assign(old.size() * 2, Bucket{});
  for (Bucket& ob : old) {
    if (ob.epoch != epoch_) {
      continue;
    }
    NodeT* n = ob.head;
    while (n != nullptr) {
      NodeT* next = n->next;
      const std::uint64_t h =
          hash_node(n->level, std::span<const Edge<NodeT>>(n->succ));
      Bucket& nb = buckets_[h & (buckets_.size() - 1)];
      if (nb.epoch != epoch_) {
        nb.head = nullptr;
        nb.epoch = epoch_;
      }
      n->next = nb.head;
      nb.head = n;
      n = next;
    }
  }
}

template <class NodeT>
template <class ReleaseFn>
void UniqueTable<NodeT>::sweep(std::uint32_t keep_mark, ReleaseFn release) {
  for (Bucket& bucket : buckets_) {
    if (bucket.epoch != epoch_) {
      continue;
    }
    NodeT* kept = nullptr;
    NodeT* n = bucket.head;
    while (n != nullptr) {
      NodeT* next = n->next;
      if (n->mark == keep_mark) {
        n->next = kept;
        kept = n;
      } else {
        release(n);
        --count_;
      }
      n = next;
    }
    bucket.head = kept;
  }
}

template class UniqueTable<VecNode>;
template class UniqueTable<MatNode>;

}  // namespace detail

// ---------------------------------------------------------------------------
// Handles
// ---------------------------------------------------------------------------

StateDD::StateDD(DDArena* arena, VecEdge root, std::size_t n)
    : arena_(arena), root_(root), n_(n) {
  if (arena_ != nullptr) arena_->pin(root_.node);
}

StateDD::StateDD(const StateDD& other)
    : arena_(other.arena_), root_(other.root_), n_(other.n_) {
  if (arena_ != nullptr) arena_->pin(root_.node);
}

StateDD& StateDD::operator=(const StateDD& other) {
  if (this == &other) return *this;
  if (other.arena_ != nullptr) other.arena_->pin(other.root_.node);
  if (arena_ != nullptr) arena_->unpin(root_.node);
  arena_ = other.arena_;
  root_ = other.root_;
  n_ = other.n_;
  return *this;
}

StateDD::StateDD(StateDD&& other) noexcept
    : arena_(other.arena_), root_(other.root_), n_(other.n_) {
  other.arena_ = nullptr;
  other.root_ = VecEdge{};
  other.n_ = 0;
}

StateDD& StateDD::operator=(StateDD&& other) noexcept {
  if (this == &other) return *this;
  if (arena_ != nullptr) arena_->unpin(root_.node);
  arena_ = other.arena_;
  root_ = other.root_;
  n_ = other.n_;
  other.arena_ = nullptr;
  other.root_ = VecEdge{};
  other.n_ = 0;
  return *this;
}

StateDD::~StateDD() {
  if (arena_ != nullptr) arena_->unpin(root_.node);
}

MatrixDD::MatrixDD(DDArena* arena, MatEdge root, std::size_t n)
    : arena_(arena), root_(root), n_(n) {
  if (arena_ != nullptr) arena_->pin(root_.node);
}

MatrixDD::MatrixDD(const MatrixDD& other)
    : arena_(other.arena_), root_(other.root_), n_(other.n_) {
  if (arena_ != nullptr) arena_->pin(root_.node);
}

MatrixDD& MatrixDD::operator=(const MatrixDD& other) {
  if (this == &other) return *this;
  if (other.arena_ != nullptr) other.arena_->pin(other.root_.node);
  if (arena_ != nullptr) arena_->unpin(root_.node);
  arena_ = other.arena_;
  root_ = other.root_;
  n_ = other.n_;
  return *this;
}

MatrixDD::MatrixDD(MatrixDD&& other) noexcept
    : arena_(other.arena_), root_(other.root_), n_(other.n_) {
  other.arena_ = nullptr;
  other.root_ = MatEdge{};
  other.n_ = 0;
}

MatrixDD& MatrixDD::operator=(MatrixDD&& other) noexcept {
  if (this == &other) return *this;
  if (arena_ != nullptr) arena_->unpin(root_.node);
  arena_ = other.arena_;
  root_ = other.root_;
  n_ = other.n_;
  other.arena_ = nullptr;
  other.root_ = MatEdge{};
  other.n_ = 0;
  return *this;
}

MatrixDD::~MatrixDD() {
  if (arena_ != nullptr) arena_->unpin(root_.node);
}

// ---------------------------------------------------------------------------
// DDArena: pinning and garbage collection
// ---------------------------------------------------------------------------

void DDArena::pin(VecNode* node) {
  if (node != nullptr) ++vec_roots_[node];
}
void DDArena::unpin(VecNode* node) {
  if (node == nullptr) return;
  auto it = vec_roots_.find(node);
  assert(it != vec_roots_.end());
  if (--it->second == 0) vec_roots_.erase(it);
}
void DDArena::pin(MatNode* node) {
  if (node != nullptr) ++mat_roots_[node];
}
void DDArena::unpin(MatNode* node) {
  if (node == nullptr) return;
  auto it = mat_roots_.find(node);
  assert(it != mat_roots_.end());
  if (--it->second == 0) mat_roots_.erase(it);
}

void DDArena::mark_vec(VecNode* node, std::uint32_t mark) {
  if (node == nullptr || node->mark == mark) return;
  node->mark = mark;
  for (const VecEdge& e : node->succ) mark_vec(e.node, mark);
}

void DDArena::mark_mat(MatNode* node, std::uint32_t mark) {
  if (node == nullptr || node->mark == mark) return;
  node->mark = mark;
  for (const MatEdge& e : node->succ) mark_mat(e.node, mark);
}

void DDArena::collect_garbage() {
  ++gc_mark_;
  if (gc_mark_ == 0) gc_mark_ = 1;  // 0 is the never-marked state
  for (const auto& [node, count] : vec_roots_) mark_vec(node, gc_mark_);
  for (const auto& [node, count] : mat_roots_) mark_mat(node, gc_mark_);
  vec_unique_.sweep(gc_mark_, [this](VecNode* n) { vec_pool_.release(n); });
  mat_unique_.sweep(gc_mark_, [this](MatNode* n) { mat_pool_.release(n); });
  // Cached results may reference released nodes.
  clear_compute_tables();
}

void DDArena::maybe_collect() {
  const std::size_t live = vec_pool_.in_use() + mat_pool_.in_use();
  if (live < gc_threshold_) return;
  collect_garbage();
  const std::size_t after = vec_pool_.in_use() + mat_pool_.in_use();
  if (after * 4 > gc_threshold_ * 3) {
    gc_threshold_ *= 2;
  }
}

void DDArena::reset() {
  assert(vec_roots_.empty() && mat_roots_.empty());
  vec_roots_.clear();
  mat_roots_.clear();
  vec_unique_.clear();
  mat_unique_.clear();
  vec_pool_.reset();
  mat_pool_.reset();
  clear_compute_tables();
  values_.clear();
}

void DDArena::clear_compute_tables() {
  vec_add_cache_.clear();
  mat_add_cache_.clear();
  mult_cache_.clear();
}

void DDArena::set_compute_tables_enabled(bool enabled) {
  compute_tables_enabled_ = enabled;
}

StateDD DDArena::state_handle(VecEdge root, std::size_t n) {
  return StateDD(this, root, n);
}

MatrixDD DDArena::matrix_handle(MatEdge root, std::size_t n) {
  return MatrixDD(this, root, n);
}

// ---------------------------------------------------------------------------
// Node construction and normalization
// ---------------------------------------------------------------------------
//
// Normalization rule: divide a node's outgoing weights by the outgoing weight
// of largest magnitude (ties broken by lowest successor index); the factor
// propagates into the incoming edge. The designated weight is set to exactly
// 1 and all other magnitudes are <= 1, which together with hash consing makes
// representations canonical.

VecEdge DDArena::make_vec_node(std::uint32_t level,
                               std::array<VecEdge, 2> succ) {
  for (VecEdge& e : succ) {
    e.w = values_.canon(e.w);
    if (e.w.exactly_zero()) e = VecEdge::zero();
  }
  if (succ[0].is_zero() && succ[1].is_zero()) {
    return VecEdge::zero();
  }
  std::size_t designated = succ[0].w.mag2() >= succ[1].w.mag2() ? 0 : 1;
  const ComplexValue factor = succ[designated].w;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    if (i == designated) {
      succ[i].w = {1.0, 0.0};
    } else if (!succ[i].is_zero()) {
      succ[i].w = values_.canon(cdiv(succ[i].w, factor));
      if (succ[i].w.exactly_zero()) succ[i] = VecEdge::zero();
    }
  }
  maybe_collect();
  VecNode* node = vec_unique_.lookup_or_create(
      level, std::span<const VecEdge>(succ),
      [this]() { return vec_pool_.allocate(); });
  return {node, factor};
}

MatEdge DDArena::make_mat_node(std::uint32_t level,
                               std::array<MatEdge, 4> succ) {
  for (MatEdge& e : succ) {
    e.w = values_.canon(e.w);
    if (e.w.exactly_zero()) e = MatEdge::zero();
  }
  std::size_t designated = 0;
  double best = -1.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    if (succ[i].is_zero()) continue;
    all_zero = false;
    const double m = succ[i].w.mag2();
    if (m > best) {
      best = m;
      designated = i;
    }
  }
  if (all_zero) {
    return MatEdge::zero();
  }
  const ComplexValue factor = succ[designated].w;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    if (i == designated) {
      succ[i].w = {1.0, 0.0};
    } else if (!succ[i].is_zero()) {
      succ[i].w = values_.canon(cdiv(succ[i].w, factor));
      if (succ[i].w.exactly_zero()) succ[i] = MatEdge::zero();
    }
  }
  maybe_collect();
  MatNode* node = mat_unique_.lookup_or_create(
      level, std::span<const MatEdge>(succ),
      [this]() { return mat_pool_.allocate(); });
  return {node, factor};
}

// ---------------------------------------------------------------------------
// State constructors
// ---------------------------------------------------------------------------

StateDD DDArena::make_basis_state(std::size_t n, std::string_view bits) {
  if (n == 0) {
    throw std::invalid_argument("make_basis_state: qubit count must be >= 1");
  }
  if (bits.size() != n) {
    throw std::invalid_argument(
        "make_basis_state: bitstring length does not match qubit count");
  }
  VecEdge edge = VecEdge::terminal({1.0, 0.0});
  for (std::uint32_t level = 1; level <= n; ++level) {
    const std::size_t q = n - level;
    const char c = bits[q];
    if (c != '0' && c != '1') {
      throw std::invalid_argument("make_basis_state: bitstring must be 0/1");
    }
    std::array<VecEdge, 2> succ{VecEdge::zero(), VecEdge::zero()};
    succ[c - '0'] = edge;
    edge = make_vec_node(level, succ);
  }
  edge.w = values_.canon(edge.w);
  return state_handle(edge, n);
}

namespace {

std::size_t qubits_for_size(std::size_t size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw std::invalid_argument(
        "make_state_from_amplitudes: size must be a power of two >= 2");
  }
  return static_cast<std::size_t>(std::countr_zero(size));
}

}  // namespace

StateDD DDArena::make_state_from_amplitudes(
    std::span<const ComplexValue> amplitudes) {
  const std::size_t n = qubits_for_size(amplitudes.size());
  if (n > 24) {
    throw ResourceLimitError("make_state_from_amplitudes: more than 24 qubits");
  }
  // Recursive halving: the top split separates q0 = 0 from q0 = 1.
  auto build = [this](auto&& self, std::span<const ComplexValue> amps,
                      std::uint32_t level) -> VecEdge {
    if (level == 0) {
      return VecEdge::terminal(amps[0]);
    }
    const std::size_t half = amps.size() / 2;
    std::array<VecEdge, 2> succ{self(self, amps.first(half), level - 1),
                                self(self, amps.last(half), level - 1)};
    return make_vec_node(level, succ);
  };
  VecEdge root = build(build, amplitudes, static_cast<std::uint32_t>(n));
  root.w = values_.canon(root.w);
  return StateDD(this, root, n);
}

// ---------------------------------------------------------------------------
// Operator construction
// ---------------------------------------------------------------------------

MatEdge DDArena::operator_chain(
    std::size_t n, const std::vector<std::pair<Qubit, Mat2>>& factors,
    ComplexValue coeff) {
  MatEdge edge = MatEdge::terminal({1.0, 0.0});
  for (std::uint32_t level = 1; level <= n; ++level) {
    const Qubit q = static_cast<Qubit>(n - level);
    const Mat2* factor = nullptr;
    for (const auto& [fq, mat] : factors) {
      if (fq == q) {
        factor = &mat;
        break;
      }
    }
    static constexpr Mat2 kIdentity{
        ComplexValue{1.0, 0.0}, ComplexValue{}, ComplexValue{},
        ComplexValue{1.0, 0.0}};
    const Mat2& m = factor != nullptr ? *factor : kIdentity;
    std::array<MatEdge, 4> succ;
    for (std::size_t i = 0; i < 4; ++i) {
      succ[i] = m[i].exactly_zero() || edge.is_zero()
                    ? MatEdge::zero()
                    : MatEdge{edge.node, edge.w * m[i]};
    }
    edge = make_mat_node(level, succ);
  }
  edge.w = edge.w * coeff;
  return edge;
}

namespace {

Mat2 base_matrix(GateKind kind, std::span<const double> params) {
  const ComplexValue zero{};
  const ComplexValue one{1.0, 0.0};
  switch (kind) {
    case GateKind::I:
      return {one, zero, zero, one};
    case GateKind::X:
    case GateKind::CX:
    case GateKind::CCX:
      return {zero, one, one, zero};
    case GateKind::Y:
      return {zero, ComplexValue{0.0, -1.0}, ComplexValue{0.0, 1.0}, zero};
    case GateKind::Z:
    case GateKind::CZ:
      return {one, zero, zero, ComplexValue{-1.0, 0.0}};
    case GateKind::H:
      return {ComplexValue{kInvSqrt2, 0.0}, ComplexValue{kInvSqrt2, 0.0},
              ComplexValue{kInvSqrt2, 0.0}, ComplexValue{-kInvSqrt2, 0.0}};
    case GateKind::S:
      return {one, zero, zero, ComplexValue{0.0, 1.0}};
    case GateKind::Sdg:
      return {one, zero, zero, ComplexValue{0.0, -1.0}};
    case GateKind::T:
      return {one, zero, zero, ComplexValue{kInvSqrt2, kInvSqrt2}};
    case GateKind::Tdg:
      return {one, zero, zero, ComplexValue{kInvSqrt2, -kInvSqrt2}};
    case GateKind::RX: {
      const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      return {ComplexValue{c, 0.0}, ComplexValue{0.0, -s},
              ComplexValue{0.0, -s}, ComplexValue{c, 0.0}};
    }
    case GateKind::RY: {
      const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      return {ComplexValue{c, 0.0}, ComplexValue{-s, 0.0},
              ComplexValue{s, 0.0}, ComplexValue{c, 0.0}};
    }
    case GateKind::RZ: {
      const double h = params[0] / 2;
      return {ComplexValue{std::cos(h), -std::sin(h)}, zero, zero,
              ComplexValue{std::cos(h), std::sin(h)}};
    }
    case GateKind::Phase:
      return {one, zero, zero,
              ComplexValue{std::cos(params[0]), std::sin(params[0])}};
    case GateKind::U3: {
      const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
      const double phi = params[1], lam = params[2];
      return {ComplexValue{c, 0.0},
              ComplexValue{-std::cos(lam) * s, -std::sin(lam) * s},
              ComplexValue{std::cos(phi) * s, std::sin(phi) * s},
              ComplexValue{std::cos(phi + lam) * c, std::sin(phi + lam) * c}};
    }
    default:
      throw UnsupportedGateError("gate has no matrix: " +
                                 std::string(gate_name(kind)));
  }
}

constexpr Mat2 kP0{ComplexValue{1.0, 0.0}, ComplexValue{}, ComplexValue{},
                   ComplexValue{}};
constexpr Mat2 kP1{ComplexValue{}, ComplexValue{}, ComplexValue{},
                   ComplexValue{1.0, 0.0}};
// |0><1| and |1><0|
constexpr Mat2 kLower{ComplexValue{}, ComplexValue{1.0, 0.0}, ComplexValue{},
                      ComplexValue{}};
constexpr Mat2 kRaise{ComplexValue{}, ComplexValue{}, ComplexValue{1.0, 0.0},
                      ComplexValue{}};
constexpr Mat2 kId2{ComplexValue{1.0, 0.0}, ComplexValue{}, ComplexValue{},
                    ComplexValue{1.0, 0.0}};


}  // namespace

MatrixDD DDArena::identity(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("identity: qubit count must be >= 1");
  }
  MatEdge e = operator_chain(n, {}, {1.0, 0.0});
  e.w = values_.canon(e.w);
  return matrix_handle(e, n);
}

MatrixDD DDArena::single_qubit_operator(const Mat2& u, Qubit target,
                                        std::size_t n) {
  if (target >= n) {
    throw std::invalid_argument("single_qubit_operator: target out of range");
  }
  MatEdge e = operator_chain(n, {{target, u}}, {1.0, 0.0});
  e.w = values_.canon(e.w);
  return matrix_handle(e, n);
}

MatrixDD DDArena::gate_matrix(const GateOp& op, std::size_t n) {
  if (op.kind == GateKind::Measure || op.kind == GateKind::Barrier) {
    throw UnsupportedGateError("gate has no matrix: " +
                               std::string(gate_name(op.kind)));
  }
  if (n == 0) {
    throw std::invalid_argument("gate_matrix: qubit count must be >= 1");
  }
  if (op.params.size() != gate_param_count(op.kind)) {
    throw std::invalid_argument("gate_matrix: wrong parameter count for " +
                                std::string(gate_name(op.kind)));
  }
  if (op.targets.size() != gate_target_count(op.kind)) {
    throw std::invalid_argument("gate_matrix: wrong target count for " +
                                std::string(gate_name(op.kind)));
  }
  std::unordered_set<Qubit> seen;
  for (Qubit q : op.targets) {
    if (q >= n) throw std::invalid_argument("gate_matrix: target out of range");
    if (!seen.insert(q).second) {
      throw std::invalid_argument("gate_matrix: duplicate operand qubit");
    }
  }
  for (Qubit q : op.controls) {
    if (q >= n) throw std::invalid_argument("gate_matrix: control out of range");
    if (!seen.insert(q).second) {
      throw std::invalid_argument(
          "gate_matrix: control overlaps target or another control");
    }
  }

  // The operator is assembled as a sum of tensor-product chains:
  //   uncontrolled V:  the chains of V itself;
  //   controlled V:    I + P1(controls) (x) (V - I_targets),
  // which keeps construction linear in n for any control/target layout.
  using Term = std::vector<std::pair<Qubit, Mat2>>;
  std::vector<std::pair<Term, ComplexValue>> terms;
  const ComplexValue one{1.0, 0.0};

  std::vector<Term> body;  // chains of V restricted to the target qubits
  if (op.kind == GateKind::Swap) {
    const Qubit a = op.targets[0], b = op.targets[1];
    body.push_back({{a, kP0}, {b, kP0}});
    body.push_back({{a, kLower}, {b, kRaise}});
    body.push_back({{a, kRaise}, {b, kLower}});
    body.push_back({{a, kP1}, {b, kP1}});
  } else {
    body.push_back({{op.targets[0], base_matrix(op.kind, op.params)}});
  }

  if (op.controls.empty()) {
    for (const Term& t : body) terms.emplace_back(t, one);
  } else {
    terms.emplace_back(Term{}, one);  // identity everywhere
    for (Term t : body) {
      for (Qubit c : op.controls) t.emplace_back(c, kP1);
      terms.emplace_back(std::move(t), one);
    }
    Term cancel;  // subtract P1(controls) (x) I_targets
    for (Qubit c : op.controls) cancel.emplace_back(c, kP1);
    for (Qubit t : op.targets) cancel.emplace_back(t, kId2);
    terms.emplace_back(std::move(cancel), ComplexValue{-1.0, 0.0});
  }

  MatEdge acc = MatEdge::zero();
  for (const auto& [factors, coeff] : terms) {
    const MatEdge chain = operator_chain(n, factors, coeff);
    acc = acc.is_zero() ? chain
                        : add_mat(acc, chain, static_cast<std::uint32_t>(n));
  }
  acc.w = values_.canon(acc.w);
  return matrix_handle(acc, n);
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

VecEdge DDArena::add_vec(VecEdge a, VecEdge b, std::uint32_t level) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (level == 0) {
    ComplexValue sum = values_.canon(a.w + b.w);
    return sum.exactly_zero() ? VecEdge::zero() : VecEdge::terminal(sum);
  }
  // Commutative: order operands canonically so a+b and b+a share an entry.
  if (std::tuple(reinterpret_cast<std::uintptr_t>(b.node), b.w.re, b.w.im) <
      std::tuple(reinterpret_cast<std::uintptr_t>(a.node), a.w.re, a.w.im)) {
    std::swap(a, b);
  }
  const VAddKey key{a.node, a.w, b.node, b.w};
  std::uint64_t h = 0;
  if (compute_tables_enabled_) {
    h = hash_combine(hash_combine(hash_ptr(a.node), hash_value(a.w)),
                     hash_combine(hash_ptr(b.node), hash_value(b.w)));
    if (const VecEdge* hit = vec_add_cache_.lookup(key, h)) {
      return *hit;
    }
  }
  std::array<VecEdge, 2> succ;
  for (std::size_t i = 0; i < 2; ++i) {
    const VecEdge ea = a.node->succ[i].is_zero()
                           ? VecEdge::zero()
                           : VecEdge{a.node->succ[i].node,
                                     a.w * a.node->succ[i].w};
    const VecEdge eb = b.node->succ[i].is_zero()
                           ? VecEdge::zero()
                           : VecEdge{b.node->succ[i].node,
                                     b.w * b.node->succ[i].w};
    succ[i] = add_vec(ea, eb, level - 1);
  }
  VecEdge result = make_vec_node(level, succ);
  if (compute_tables_enabled_) {
    vec_add_cache_.store(key, h, result);
  }
  return result;
}

MatEdge DDArena::add_mat(MatEdge a, MatEdge b, std::uint32_t level) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (level == 0) {
    ComplexValue sum = values_.canon(a.w + b.w);
    return sum.exactly_zero() ? MatEdge::zero() : MatEdge::terminal(sum);
  }
  if (std::tuple(reinterpret_cast<std::uintptr_t>(b.node), b.w.re, b.w.im) <
      std::tuple(reinterpret_cast<std::uintptr_t>(a.node), a.w.re, a.w.im)) {
    std::swap(a, b);
  }
  const MAddKey key{a.node, a.w, b.node, b.w};
  std::uint64_t h = 0;
  if (compute_tables_enabled_) {
    h = hash_combine(hash_combine(hash_ptr(a.node), hash_value(a.w)),
                     hash_combine(hash_ptr(b.node), hash_value(b.w)));
    if (const MatEdge* hit = mat_add_cache_.lookup(key, h)) {
      return *hit;
    }
  }
  std::array<MatEdge, 4> succ;
  for (std::size_t i = 0; i < 4; ++i) {
    const MatEdge ea = a.node->succ[i].is_zero()
                           ? MatEdge::zero()
                           : MatEdge{a.node->succ[i].node,
                                     a.w * a.node->succ[i].w};
    const MatEdge eb = b.node->succ[i].is_zero()
                           ? MatEdge::zero()
                           : MatEdge{b.node->succ[i].node,
                                     b.w * b.node->succ[i].w};
    succ[i] = add_mat(ea, eb, level - 1);
  }
  MatEdge result = make_mat_node(level, succ);
  if (compute_tables_enabled_) {
    mat_add_cache_.store(key, h, result);
  }
  return result;
}

// Caches unit-weight node products; matrix-vector multiplication is bilinear,
// so the top weights factor out of the recursion entirely.
VecEdge DDArena::mult_nodes(MatNode* m, VecNode* v, std::uint32_t level) {
  if (level == 0) {
    return VecEdge::terminal({1.0, 0.0});
  }
  const MultKey key{m, v};
  std::uint64_t h = 0;
  if (compute_tables_enabled_) {
    h = hash_combine(hash_ptr(m), hash_ptr(v));
    if (const VecEdge* hit = mult_cache_.lookup(key, h)) {
      return *hit;
    }
  }
  std::array<VecEdge, 2> succ;
  for (std::size_t row = 0; row < 2; ++row) {
    VecEdge acc = VecEdge::zero();
    for (std::size_t col = 0; col < 2; ++col) {
      const MatEdge& me = m->succ[2 * row + col];
      const VecEdge& ve = v->succ[col];
      if (me.is_zero() || ve.is_zero()) continue;
      VecEdge prod = mult_nodes(me.node, ve.node, level - 1);
      prod.w = prod.w * (me.w * ve.w);
      if (prod.w.exactly_zero()) continue;
      acc = acc.is_zero() ? prod : add_vec(acc, prod, level - 1);
    }
    succ[row] = acc;
  }
  VecEdge result = make_vec_node(level, succ);
  if (compute_tables_enabled_) {
    mult_cache_.store(key, h, result);
  }
  return result;
}

VecEdge DDArena::mult_mat_vec(MatEdge m, VecEdge v, std::uint32_t level) {
  if (m.is_zero() || v.is_zero()) return VecEdge::zero();
  VecEdge r = mult_nodes(m.node, v.node, level);
  r.w = r.w * (m.w * v.w);
  return r.w.exactly_zero() ? VecEdge::zero() : r;
}

double DDArena::mass(const VecEdge& e,
                     std::unordered_map<const VecNode*, double>& memo) const {
  if (e.is_zero()) return 0.0;
  if (e.is_terminal()) return e.w.mag2();
  auto it = memo.find(e.node);
  double m;
  if (it != memo.end()) {
    m = it->second;
  } else {
    m = 0.0;
    for (const VecEdge& s : e.node->succ) m += mass(s, memo);
    memo.emplace(e.node, m);
  }
  return e.w.mag2() * m;
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

StateDD apply_matrix(const MatrixDD& op, const StateDD& state) {
  DDArena& arena = state.arena();
  if (&op.arena() != &arena) {
    throw std::invalid_argument("apply_matrix: operands from different arenas");
  }
  if (op.num_qubits() != state.num_qubits()) {
    throw std::invalid_argument("apply_matrix: qubit count mismatch");
  }
  VecEdge r = arena.mult_mat_vec(
      op.root(), state.root(), static_cast<std::uint32_t>(state.num_qubits()));
  r.w = arena.values_.canon(r.w);
  if (r.w.exactly_zero()) r = VecEdge::zero();
  return arena.state_handle(r, state.num_qubits());
}

StateDD add(const StateDD& a, const StateDD& b) {
  DDArena& arena = a.arena();
  if (&b.arena() != &arena) {
    throw std::invalid_argument("add: operands from different arenas");
  }
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("add: qubit count mismatch");
  }
  VecEdge r = arena.add_vec(a.root(), b.root(),
                            static_cast<std::uint32_t>(a.num_qubits()));
  r.w = arena.values_.canon(r.w);
  if (r.w.exactly_zero()) r = VecEdge::zero();
  return arena.state_handle(r, a.num_qubits());
}

MatrixDD add(const MatrixDD& a, const MatrixDD& b) {
  DDArena& arena = a.arena();
  if (&b.arena() != &arena) {
    throw std::invalid_argument("add: operands from different arenas");
  }
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("add: qubit count mismatch");
  }
  MatEdge r = arena.add_mat(a.root(), b.root(),
                            static_cast<std::uint32_t>(a.num_qubits()));
  r.w = arena.values_.canon(r.w);
  if (r.w.exactly_zero()) r = MatEdge::zero();
  return arena.matrix_handle(r, a.num_qubits());
}

StateDD scale(const StateDD& state, ComplexValue c) {
  DDArena& arena = state.arena();
  VecEdge r = state.root();
  r.w = arena.values_.canon(r.w * c);
  if (r.w.exactly_zero()) r = VecEdge::zero();
  return arena.state_handle(r, state.num_qubits());
}

ComplexValue amplitude(const StateDD& state, std::string_view bits) {
  if (bits.size() != state.num_qubits()) {
    throw std::invalid_argument("amplitude: bitstring length mismatch");
  }
  VecEdge cur = state.root();
  ComplexValue acc = cur.w;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] != '0' && bits[q] != '1') {
      throw std::invalid_argument("amplitude: bitstring must be 0/1");
    }
    if (acc.exactly_zero() || cur.is_terminal()) {
      return {};
    }
    const VecEdge& next = cur.node->succ[bits[q] - '0'];
    acc = acc * next.w;
    cur = next;
  }
  return state.arena().values().canon(acc);
}

double norm_squared(const StateDD& state) {
  std::unordered_map<const VecNode*, double> memo;
  return state.arena().mass(state.root(), memo);
}

ComplexValue inner_product(const StateDD& a, const StateDD& b) {
  DDArena& arena = a.arena();
  if (&b.arena() != &arena) {
    throw std::invalid_argument(
        "inner_product: operands from different arenas");
  }
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("inner_product: qubit count mismatch");
  }
  struct PairHash {
    std::size_t operator()(
        const std::pair<const VecNode*, const VecNode*>& p) const noexcept {
      return hash_combine(hash_ptr(p.first), hash_ptr(p.second));
    }
  };
  std::unordered_map<std::pair<const VecNode*, const VecNode*>, ComplexValue,
                     PairHash>
      memo;
  // Unit-weight node kernel; sesquilinearity factors the top weights out.
  auto kernel = [&memo](auto&& self, const VecNode* x,
                        const VecNode* y) -> ComplexValue {
    if (x == nullptr || y == nullptr) {
      return {1.0, 0.0};
    }
    const auto key = std::make_pair(x, y);
    if (auto it = memo.find(key); it != memo.end()) {
      return it->second;
    }
    ComplexValue sum{};
    for (std::size_t i = 0; i < 2; ++i) {
      const VecEdge& ex = x->succ[i];
      const VecEdge& ey = y->succ[i];
      if (ex.is_zero() || ey.is_zero()) continue;
      sum = sum + conj(ex.w) * ey.w * self(self, ex.node, ey.node);
    }
    memo.emplace(key, sum);
    return sum;
  };
  if (a.root().is_zero() || b.root().is_zero()) {
    return {};
  }
  const ComplexValue value =
      conj(a.root().w) * b.root().w * kernel(kernel, a.root().node, b.root().node);
  return arena.values().canon(value);
}

std::string measure_all(const StateDD& state, RandomStream& rng) {
  std::unordered_map<const VecNode*, double> memo;
  DDArena& arena = state.arena();
  const double total = arena.mass(state.root(), memo);
  if (std::abs(total - 1.0) > 1e-6) {
    throw NumericDegeneracyError(
        "measure_all: state norm deviates from 1 by more than 1e-6");
  }
  std::string bits(state.num_qubits(), '0');
  VecEdge cur = state.root();
  for (std::size_t q = 0; q < state.num_qubits(); ++q) {
    if (cur.is_terminal()) {
      throw NumericDegeneracyError("measure_all: truncated diagram");
    }
    const double m0 = arena.mass(cur.node->succ[0], memo);
    const double m1 = arena.mass(cur.node->succ[1], memo);
    const double p0 = m0 / (m0 + m1);
    const std::size_t bit = rng.next_unit() < p0 ? 0 : 1;
    bits[q] = static_cast<char>('0' + bit);
    cur = cur.node->succ[bit];
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Introspection
// ---------------------------------------------------------------------------

namespace {

template <class NodeT>
void collect_nodes(const NodeT* node, std::unordered_set<const NodeT*>& seen) {
  if (node == nullptr || seen.contains(node)) return;
  seen.insert(node);
  for (const auto& e : node->succ) collect_nodes(e.node, seen);
}

}  // namespace

std::size_t node_count(const StateDD& state) {
  std::unordered_set<const VecNode*> seen;
  collect_nodes(state.root().node, seen);
  return seen.size();
}

std::size_t node_count(const MatrixDD& op) {
  std::unordered_set<const MatNode*> seen;
  collect_nodes(op.root().node, seen);
  return seen.size();
}

void for_each_node(const StateDD& state,
                   const std::function<void(const VecNode&)>& fn) {
  std::unordered_set<const VecNode*> seen;
  collect_nodes(state.root().node, seen);
  for (const VecNode* n : seen) fn(*n);
}

void for_each_node(const MatrixDD& op,
                   const std::function<void(const MatNode&)>& fn) {
  std::unordered_set<const MatNode*> seen;
  collect_nodes(op.root().node, seen);
  for (const MatNode* n : seen) fn(*n);
}

std::vector<ComplexValue> to_amplitudes(const StateDD& state) {
  const std::size_t n = state.num_qubits();
  if (n > 24) {
    throw ResourceLimitError("to_amplitudes: more than 24 qubits");
  }
  std::vector<ComplexValue> out(std::size_t{1} << n);
  auto walk = [&out](auto&& self, VecEdge e, ComplexValue acc,
                     std::size_t index, std::uint32_t level) -> void {
    acc = acc * e.w;
    if (acc.exactly_zero()) return;
    if (level == 0) {
      out[index] = acc;
      return;
    }
    self(self, e.node->succ[0], acc, index << 1, level - 1);
    self(self, e.node->succ[1], acc, (index << 1) | 1, level - 1);
  };
  if (!state.root().is_zero()) {
    walk(walk, state.root(), {1.0, 0.0}, 0, static_cast<std::uint32_t>(n));
  }
  return out;
}

std::vector<std::vector<ComplexValue>> to_dense_matrix(const MatrixDD& op) {
  const std::size_t n = op.num_qubits();
  if (n > 12) {
    throw ResourceLimitError("to_dense_matrix: more than 12 qubits");
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::vector<ComplexValue>> out(dim,
                                             std::vector<ComplexValue>(dim));
  auto walk = [&out](auto&& self, MatEdge e, ComplexValue acc, std::size_t row,
                     std::size_t col, std::uint32_t level) -> void {
    acc = acc * e.w;
    if (acc.exactly_zero()) return;
    if (level == 0) {
      out[row][col] = acc;
      return;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      self(self, e.node->succ[i], acc, (row << 1) | (i >> 1),
           (col << 1) | (i & 1), level - 1);
    }
  };
  if (!op.root().is_zero()) {
    walk(walk, op.root(), {1.0, 0.0}, 0, 0, static_cast<std::uint32_t>(n));
  }
  return out;
}

namespace {

template <class NodeT>
void write_dot_impl(const Edge<NodeT>& root, std::size_t n, std::ostream& os) {
  os << "digraph dd {\n  rankdir=TB;\n  root [shape=point];\n";
  std::unordered_set<const NodeT*> seen;
  collect_nodes(root.node, seen);
  for (const NodeT* node : seen) {
    os << "  n" << node << " [label=\"q" << (n - node->level)
       << "\", shape=circle];\n";
  }
  std::size_t stub = 0;
  auto edge_label = [](ComplexValue w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g%+.4gi", w.re, w.im);
    return std::string(buf);
  };
  os << "  t [label=\"1\", shape=box];\n";
  if (root.node != nullptr) {
    os << "  root -> n" << root.node << " [label=\"" << edge_label(root.w)
       << "\"];\n";
  } else {
    os << "  root -> t [label=\"" << edge_label(root.w) << "\"];\n";
  }
  for (const NodeT* node : seen) {
    for (std::size_t i = 0; i < node->succ.size(); ++i) {
      const auto& e = node->succ[i];
      if (e.is_zero()) {
        os << "  z" << stub << " [label=\"0\", shape=plaintext];\n";
        os << "  n" << node << " -> z" << stub++ << " [label=\"" << i
           << "\"];\n";
        continue;
      }
      if (e.node == nullptr) {
        os << "  n" << node << " -> t [label=\"" << i << ": "
           << edge_label(e.w) << "\"];\n";
      } else {
        os << "  n" << node << " -> n" << e.node << " [label=\"" << i << ": "
           << edge_label(e.w) << "\"];\n";
      }
    }
  }
  os << "}\n";
}

}  // namespace

void write_dot(const StateDD& state, std::ostream& os) {
  write_dot_impl(state.root(), state.num_qubits(), os);
}

void write_dot(const MatrixDD& op, std::ostream& os) {
  write_dot_impl(op.root(), op.num_qubits(), os);
}

}  // namespace stochdd
