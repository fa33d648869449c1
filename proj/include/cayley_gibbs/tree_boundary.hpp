#pragma once

// Finite rooted half trees and the four-valued boundary fields built on them
// from a scheme matrix.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cayley_gibbs/field_pair.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/special_functions.hpp"

namespace cayley_gibbs {

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vertex = std::size_t;
inline constexpr Vertex kNoParent = std::numeric_limits<Vertex>::max();
inline constexpr std::size_t kDefaultVertexCap = 1'000'000;

/// Half tree of order k and depth n: every vertex above the last level has k
/// children. Vertices are numbered breadth-first, so level m occupies the
/// index range [level_begin(m), level_end(m)) and the children of v are
/// k*v + 1, ..., k*v + k.
class FiniteTree {
 public:
  FiniteTree(int k, int depth, std::size_t cap = kDefaultVertexCap) : k_(k), depth_(depth) {
    if (k < 1) {
      throw std::invalid_argument("build_tree: k must be at least 1");
    }
    if (depth < 0) {
      throw std::invalid_argument("build_tree: depth must be non-negative");
    }
    std::size_t width = 1;
    level_begin_.push_back(0);
    for (int m = 0; m <= depth; ++m) {
      if (level_begin_.back() + width > cap || width > cap) {
        throw CapacityError("build_tree: k=" + std::to_string(k) + " depth=" + std::to_string(depth) +
                            " exceeds the vertex cap of " + std::to_string(cap));
      }
      level_begin_.push_back(level_begin_.back() + width);
      width *= static_cast<std::size_t>(k);
    }
  }

  int k() const { return k_; }
  int depth() const { return depth_; }
  std::size_t size() const { return level_begin_.back(); }

  std::size_t level_begin(int m) const { return level_begin_.at(m); }
  std::size_t level_end(int m) const { return level_begin_.at(m + 1); }
  std::size_t level_size(int m) const { return level_end(m) - level_begin(m); }

  /// Number of vertices in V_m = W_0 u ... u W_m.
  std::size_t ball_size(int m) const { return level_end(m); }

  int level_of(Vertex v) const {
    check(v);
    const auto it = std::upper_bound(level_begin_.begin(), level_begin_.end(), v);
    return static_cast<int>(it - level_begin_.begin()) - 1;
  }

  Vertex parent(Vertex v) const {
    check(v);
    return v == 0 ? kNoParent : (v - 1) / static_cast<std::size_t>(k_);
  }

  bool is_internal(Vertex v) const { return level_of(v) < depth_; }

  Vertex first_child(Vertex v) const { return static_cast<std::size_t>(k_) * v + 1; }

  /// Children of an internal vertex, in order.
  std::vector<Vertex> children(Vertex v) const {
    std::vector<Vertex> out;
    if (!is_internal(v)) {
      return out;
    }
    out.reserve(k_);
    for (int j = 0; j < k_; ++j) {
      out.push_back(first_child(v) + j);
    }
    return out;
  }

  bool contains(Vertex v) const { return v < size(); }

 private:
  void check(Vertex v) const {
    if (!contains(v)) {
      throw std::out_of_range("vertex " + std::to_string(v) + " not in tree");
    }
  }

  int k_;
  int depth_;
  std::vector<std::size_t> level_begin_;
};

inline FiniteTree build_tree(int k, int n, std::size_t cap = kDefaultVertexCap) {
  return FiniteTree(k, n, cap);
}

// ---------------------------------------------------------------------------

enum class FieldLabel : std::uint8_t { PlusH, MinusH, PlusL, MinusL };

inline constexpr FieldLabel negate(FieldLabel x) {
  switch (x) {
    case FieldLabel::PlusH: return FieldLabel::MinusH;
    case FieldLabel::MinusH: return FieldLabel::PlusH;
    case FieldLabel::PlusL: return FieldLabel::MinusL;
    case FieldLabel::MinusL: return FieldLabel::PlusL;
  }
  return x;
}

inline constexpr bool is_h_type(FieldLabel x) { return x == FieldLabel::PlusH || x == FieldLabel::MinusH; }
inline constexpr int label_sign(FieldLabel x) {
  return (x == FieldLabel::PlusH || x == FieldLabel::PlusL) ? 1 : -1;
}

inline std::string_view to_string(FieldLabel x) {
  switch (x) {
    case FieldLabel::PlusH: return "+H";
    case FieldLabel::MinusH: return "-H";
    case FieldLabel::PlusL: return "+L";
    case FieldLabel::MinusL: return "-L";
  }
  return "?";
}

inline FieldLabel parse_label(std::string_view s) {
  if (s == "+H") return FieldLabel::PlusH;
  if (s == "-H") return FieldLabel::MinusH;
  if (s == "+L") return FieldLabel::PlusL;
  if (s == "-L") return FieldLabel::MinusL;
  throw FormatError("unknown field label '" + std::string(s) + "'");
}

inline double label_value(FieldLabel x, const FieldPair& values) {
  switch (x) {
    case FieldLabel::PlusH: return values.h;
    case FieldLabel::MinusH: return -values.h;
    case FieldLabel::PlusL: return values.l;
    case FieldLabel::MinusL: return -values.l;
  }
  return 0.0;
}

/// Child labels of a vertex carrying `parent`, in canonical block order.
inline std::vector<FieldLabel> child_recipe(const SchemeMatrix& m, FieldLabel parent) {
  const auto& counts = is_h_type(parent) ? m.a : m.b;
  static constexpr std::array<FieldLabel, 4> blocks{FieldLabel::PlusH, FieldLabel::MinusH, FieldLabel::PlusL,
                                                    FieldLabel::MinusL};
  const bool flip = label_sign(parent) < 0;
  std::vector<FieldLabel> out;
  out.reserve(m.k);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < counts[i]; ++j) {
      out.push_back(flip ? negate(blocks[i]) : blocks[i]);
    }
  }
  return out;
}

/// Symbolic labelling of every vertex of a finite tree together with the
/// numbers (h, l) the labels stand for.
class BoundaryAssignment {
 public:
  BoundaryAssignment(std::shared_ptr<const FiniteTree> tree, std::vector<FieldLabel> labels, FieldPair values)
      : tree_(std::move(tree)), labels_(std::move(labels)), values_(values) {
    if (!tree_ || labels_.size() != tree_->size()) {
      throw MismatchError("boundary assignment: label count does not match tree size");
    }
  }

  const FiniteTree& tree() const { return *tree_; }
  const std::shared_ptr<const FiniteTree>& tree_ptr() const { return tree_; }
  const FieldPair& values() const { return values_; }
  const std::vector<FieldLabel>& labels() const { return labels_; }

  FieldLabel label(Vertex v) const {
    if (v >= labels_.size()) {
      throw std::out_of_range("boundary assignment: unknown vertex " + std::to_string(v));
    }
    return labels_[v];
  }

  /// Same labels, different numeric values.
  BoundaryAssignment with_values(FieldPair values) const { return {tree_, labels_, values}; }

  /// Vertex-wise negation of the labels.
  BoundaryAssignment negated() const {
    std::vector<FieldLabel> flipped(labels_.size());
    std::transform(labels_.begin(), labels_.end(), flipped.begin(), [](FieldLabel x) { return negate(x); });
    return {tree_, std::move(flipped), values_};
  }

 private:
  std::shared_ptr<const FiniteTree> tree_;
  std::vector<FieldLabel> labels_;
  FieldPair values_;
};

/// Labels the tree top-down from `root_label`. Children receive the
/// canonical recipe (a1 / b1 block first); with a seed, each vertex's child
/// labels are shuffled, which preserves every child multiset.
inline BoundaryAssignment assign_fields(std::shared_ptr<const FiniteTree> tree, const SchemeMatrix& m,
                                        FieldLabel root_label, FieldPair values,
                                        std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  if (!tree) {
    throw std::invalid_argument("assign_fields: null tree");
  }
  if (tree->k() != m.k) {
    throw MismatchError("assign_fields: tree order " + std::to_string(tree->k()) + " differs from scheme order " +
                        std::to_string(m.k));
  }
  m.validate();
  std::vector<FieldLabel> labels(tree->size());
  labels[0] = root_label;
  std::optional<std::mt19937_64> rng;
  if (shuffle_seed) {
    rng.emplace(*shuffle_seed);
  }
  const std::array<std::vector<FieldLabel>, 4> recipes{
      child_recipe(m, FieldLabel::PlusH), child_recipe(m, FieldLabel::MinusH), child_recipe(m, FieldLabel::PlusL),
      child_recipe(m, FieldLabel::MinusL)};
  if (tree->depth() > 0) {
    const std::size_t internal_end = tree->level_end(tree->depth() - 1);
    for (Vertex v = 0; v < internal_end; ++v) {
      auto kids = recipes[static_cast<std::size_t>(labels[v])];
      if (rng) {
        std::shuffle(kids.begin(), kids.end(), *rng);
      }
      std::copy(kids.begin(), kids.end(), labels.begin() + static_cast<std::ptrdiff_t>(tree->first_child(v)));
    }
  }
  return {std::move(tree), std::move(labels), values};
}

inline BoundaryAssignment assign_fields(const FiniteTree& tree, const SchemeMatrix& m, FieldLabel root_label,
                                        FieldPair values, std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  return assign_fields(std::make_shared<const FiniteTree>(tree), m, root_label, values, shuffle_seed);
}

inline double numeric_field(const BoundaryAssignment& assignment, Vertex x) {
  return label_value(assignment.label(x), assignment.values());
}

/// Restriction of an assignment to the subtree rooted at x (down to the same
/// last level), renumbered breadth-first with x as the new root.
inline BoundaryAssignment subtree_assignment(const BoundaryAssignment& assignment, Vertex x) {
  const FiniteTree& t = assignment.tree();
  const int top = t.level_of(x);
  auto sub = std::make_shared<const FiniteTree>(t.k(), t.depth() - top);
  std::vector<FieldLabel> labels;
  labels.reserve(sub->size());
  std::size_t first = x;
  std::size_t width = 1;
  for (int m = 0; m <= sub->depth(); ++m) {
    for (std::size_t j = 0; j < width; ++j) {
      labels.push_back(assignment.label(first + j));
    }
    first = static_cast<std::size_t>(t.k()) * first + 1;
    width *= static_cast<std::size_t>(t.k());
  }
  return {std::move(sub), std::move(labels), assignment.values()};
}

/// Restriction to V_n (levels 0..n).
inline BoundaryAssignment truncate(const BoundaryAssignment& assignment, int n) {
  const FiniteTree& t = assignment.tree();
  if (n < 0 || n > t.depth()) {
    throw std::invalid_argument("truncate: depth " + std::to_string(n) + " outside tree");
  }
  if (n == t.depth()) {
    return assignment;
  }
  auto sub = std::make_shared<const FiniteTree>(t.k(), n);
  std::vector<FieldLabel> labels(assignment.labels().begin(),
                                 assignment.labels().begin() + static_cast<std::ptrdiff_t>(sub->size()));
  return {std::move(sub), std::move(labels), assignment.values()};
}

// ---------------------------------------------------------------------------

struct CompatibilityReport {
  double max_residual = 0.0;
  Vertex worst_vertex = 0;
  bool pass = true;
};

/// Checks h_x = sum_{y in S(x)} f_theta(h_y) at every internal vertex.
inline CompatibilityReport verify_compatibility(const BoundaryAssignment& assignment, double theta, double tol) {
  const FiniteTree& t = assignment.tree();
  if (t.depth() < 1) {
    throw std::invalid_argument("verify_compatibility: tree depth must be at least 1");
  }
  CompatibilityReport rep;
  const std::size_t internal_end = t.level_end(t.depth() - 1);
  const auto k = static_cast<std::size_t>(t.k());
  for (Vertex v = 0; v < internal_end; ++v) {
    double sum = 0.0;
    const Vertex c0 = t.first_child(v);
    for (std::size_t j = 0; j < k; ++j) {
      sum += f_theta(theta, numeric_field(assignment, c0 + j));
    }
    const double res = std::fabs(numeric_field(assignment, v) - sum);
    if (res > rep.max_residual) {
      rep.max_residual = res;
      rep.worst_vertex = v;
    }
  }
  rep.pass = rep.max_residual < tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Text export: header "k=<k> n=<n> h=<h> l=<l>" followed by one line
// "vertex<TAB>parent<TAB>label" per vertex; the root's parent is -1.

inline void write_assignment(std::ostream& os, const BoundaryAssignment& assignment) {
  const FiniteTree& t = assignment.tree();
  // Shortest text that reads back to the same double.
  auto shortest = [](double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
  };
  os << "k=" << t.k() << " n=" << t.depth() << " h=" << shortest(assignment.values().h)
     << " l=" << shortest(assignment.values().l) << '\n';
  for (Vertex v = 0; v < t.size(); ++v) {
    os << v << '\t';
    if (v == 0) {
      os << -1;
    } else {
      os << t.parent(v);
    }
    os << '\t' << to_string(assignment.label(v)) << '\n';
  }
}

inline BoundaryAssignment read_assignment(std::istream& is, std::size_t cap = kDefaultVertexCap) {
  std::string line;
  if (!std::getline(is, line)) {
    throw FormatError("assignment: missing header");
  }
  int k = 0;
  int n = 0;
  double h = 0.0;
  double l = 0.0;
  {
    std::istringstream hs(line);
    std::string tok;
    int seen = 0;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw FormatError("assignment: malformed header token '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      try {
        if (key == "k") {
          k = std::stoi(val);
        } else if (key == "n") {
          n = std::stoi(val);
        } else if (key == "h") {
          h = std::stod(val);
        } else if (key == "l") {
          l = std::stod(val);
        } else {
          throw FormatError("assignment: unknown header key '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw FormatError("assignment: bad header value '" + tok + "'");
      }
      ++seen;
    }
    if (seen != 4) {
      throw FormatError("assignment: header must carry k, n, h and l");
    }
  }
  auto tree = std::make_shared<const FiniteTree>(k, n, cap);
  std::vector<FieldLabel> labels(tree->size());
  std::vector<bool> seen(tree->size(), false);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    long long vi = 0;
    long long pi = 0;
    std::string lab;
    if (!(ls >> vi >> pi >> lab)) {
      throw FormatError("assignment: malformed line '" + line + "'");
    }
    if (vi < 0 || static_cast<std::size_t>(vi) >= tree->size()) {
      throw FormatError("assignment: vertex index out of range in '" + line + "'");
    }
    const auto v = static_cast<Vertex>(vi);
    const long long expected_parent = v == 0 ? -1 : static_cast<long long>(tree->parent(v));
    if (pi != expected_parent) {
      throw FormatError("assignment: parent of vertex " + std::to_string(v) + " is not breadth-first");
    }
    if (seen[v]) {
      throw FormatError("assignment: duplicate vertex " + std::to_string(v));
    }
    seen[v] = true;
    labels[v] = parse_label(lab);
    ++rows;
  }
  if (rows != tree->size()) {
    throw FormatError("assignment: expected " + std::to_string(tree->size()) + " vertices, got " +
                      std::to_string(rows));
  }
  return {std::move(tree), std::move(labels), FieldPair{h, l}};
}

}  // namespace cayley_gibbs
