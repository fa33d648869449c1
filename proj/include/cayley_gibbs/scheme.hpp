#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cayley_gibbs/field_pair.hpp"

namespace cayley_gibbs {

class InvalidScheme : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Count matrix of a four-valued boundary field on the half tree of order k.
///
/// A vertex carrying +h has a[0] children with +h, a[1] with -h, a[2] with +l
/// and a[3] with -l; a vertex carrying +l uses b the same way. Vertices with
/// -h or -l use the negated recipe. Both rows sum to k.
struct SchemeMatrix {
  int k = 0;
  std::array<int, 4> a{};
  std::array<int, 4> b{};

  static SchemeMatrix make(int k, std::array<int, 4> a, std::array<int, 4> b) {
    SchemeMatrix m{k, a, b};
    m.validate();
    return m;
  }

  void validate() const {
    if (k < 1) {
      throw InvalidScheme("scheme: tree order k must be at least 1");
    }
    int sa = 0;
    int sb = 0;
    for (int i = 0; i < 4; ++i) {
      if (a[i] < 0 || b[i] < 0) {
        throw InvalidScheme("scheme: entries must be non-negative");
      }
      sa += a[i];
      sb += b[i];
    }
    if (sa != k || sb != k) {
      throw InvalidScheme("scheme: row sums must equal k=" + std::to_string(k) + " (got " +
                          std::to_string(sa) + ", " + std::to_string(sb) + ")");
    }
  }

  friend auto operator<=>(const SchemeMatrix&, const SchemeMatrix&) = default;
};

/// (a, b, c, d) = (a1 - a2, a3 - a4, b1 - b2, b3 - b4). The fixed-point
/// system reads h = a f(h) + b f(l), l = c f(h) + d f(l).
struct ReducedParams {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;

  bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }

  /// L1 and parity constraints that characterize the image of `reduce`.
  bool realizable_for(int k) const {
    auto row_ok = [k](int x, int y) {
      const int l1 = std::abs(x) + std::abs(y);
      return l1 <= k && (k - l1) % 2 == 0;
    };
    return k >= 1 && row_ok(a, b) && row_ok(c, d);
  }

  ReducedParams negated() const { return {-a, -b, -c, -d}; }

  friend auto operator<=>(const ReducedParams&, const ReducedParams&) = default;
};

inline ReducedParams reduce(const SchemeMatrix& m) {
  return {m.a[0] - m.a[1], m.a[2] - m.a[3], m.b[0] - m.b[1], m.b[2] - m.b[3]};
}

namespace detail {

template <class Fn>
void for_each_composition(int k, Fn&& fn) {
  for (int x1 = 0; x1 <= k; ++x1) {
    for (int x2 = 0; x2 <= k - x1; ++x2) {
      for (int x3 = 0; x3 <= k - x1 - x2; ++x3) {
        fn(std::array<int, 4>{x1, x2, x3, k - x1 - x2 - x3});
      }
    }
  }
}

}  // namespace detail

/// Visits every valid scheme of order k once, in lexicographic order of
/// (a1, a2, a3, a4, b1, b2, b3, b4).
template <class Fn>
void for_each_scheme(int k, Fn&& fn) {
  if (k < 1) {
    throw InvalidScheme("enumerate_schemes: k must be at least 1");
  }
  detail::for_each_composition(k, [&](const std::array<int, 4>& a) {
    detail::for_each_composition(k, [&](const std::array<int, 4>& b) { fn(SchemeMatrix{k, a, b}); });
  });
}

inline std::vector<SchemeMatrix> enumerate_schemes(int k) {
  std::vector<SchemeMatrix> out;
  for_each_scheme(k, [&](const SchemeMatrix& m) { out.push_back(m); });
  return out;
}

/// C(k+3, 3)^2.
inline std::uint64_t scheme_count(int k) {
  const auto per_row = static_cast<std::uint64_t>(k + 3) * (k + 2) * (k + 1) / 6;
  return per_row * per_row;
}

inline std::set<ReducedParams> realizable_reduced(int k) {
  if (k < 1) {
    throw InvalidScheme("realizable_reduced: k must be at least 1");
  }
  std::set<ReducedParams> out;
  for (int a = -k; a <= k; ++a) {
    for (int b = -k; b <= k; ++b) {
      for (int c = -k; c <= k; ++c) {
        for (int d = -k; d <= k; ++d) {
          const ReducedParams r{a, b, c, d};
          if (r.realizable_for(k)) {
            out.insert(r);
          }
        }
      }
    }
  }
  return out;
}

/// (bc - ad) theta^2 + (a + d) theta, i.e. 1 - det(I - theta M_reduced).
inline double criterion_value(const ReducedParams& r, double theta) {
  return static_cast<double>(r.b * r.c - r.a * r.d) * theta * theta +
         static_cast<double>(r.a + r.d) * theta;
}

/// Non-uniqueness test |(bc - ad) theta^2 + (a + d) theta| > 1. Equality is
/// reported as false.
inline bool nonuniqueness_criterion(const ReducedParams& r, double theta) {
  return std::fabs(criterion_value(r, theta)) > 1.0;
}

// ---------------------------------------------------------------------------
// Classification against the known families.

enum class FamilyTag {
  TranslationInvariant,
  ArtTranslationInvariant,
  InterfaceBG,
  TwoPeriodic,
  WeaklyPeriodicI2,
  WeaklyPeriodicI3,
  NewGeneric,
};

inline std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::TranslationInvariant: return "TranslationInvariant";
    case FamilyTag::ArtTranslationInvariant: return "ArtTranslationInvariant";
    case FamilyTag::InterfaceBG: return "InterfaceBG";
    case FamilyTag::TwoPeriodic: return "TwoPeriodic";
    case FamilyTag::WeaklyPeriodicI2: return "WeaklyPeriodicI2";
    case FamilyTag::WeaklyPeriodicI3: return "WeaklyPeriodicI3";
    case FamilyTag::NewGeneric: return "NewGeneric";
  }
  return "NewGeneric";
}

/// Family label. `param` carries k0 for ART and |A| for the weakly periodic
/// families and is empty otherwise.
struct MeasureFamily {
  FamilyTag tag = FamilyTag::NewGeneric;
  std::optional<int> param;

  std::string label() const {
    std::string s(to_string(tag));
    if (param) {
      s += (tag == FamilyTag::ArtTranslationInvariant ? "(k0=" : "(|A|=") + std::to_string(*param) + ")";
    }
    return s;
  }

  friend bool operator==(const MeasureFamily&, const MeasureFamily&) = default;
};

inline constexpr double kClassifyFieldTol = 1e-9;

/// Patterns are tried in a fixed priority order; the first match wins.
/// Integer patterns compare exactly, the side conditions l = 0 and l = h use
/// `field_tol`.
inline MeasureFamily classify(const SchemeMatrix& m, double h, double l,
                              double field_tol = kClassifyFieldTol) {
  const int k = m.k;
  const auto& a = m.a;
  const auto& b = m.b;

  if (a[0] == k && a[1] == 0 && a[2] == 0 && a[3] == 0) {
    return {FamilyTag::TranslationInvariant, std::nullopt};
  }
  if (a[0] >= 1 && a[1] == 0 && b[0] == 0 && b[1] == 0 && a[2] + a[3] == k - a[0] &&
      std::fabs(l) <= field_tol) {
    return {FamilyTag::ArtTranslationInvariant, a[0]};
  }
  if (std::fabs(l - h) <= field_tol && a[1] + a[3] == a[2] && a == b) {
    return {FamilyTag::InterfaceBG, std::nullopt};
  }
  if (a[0] == 0 && a[1] == k) {
    return {FamilyTag::TwoPeriodic, std::nullopt};
  }
  // |A| ranges over 1..k (A is a proper non-empty subset of {1..k+1}).
  const int size_i2 = a[2];
  if (size_i2 >= 1 && size_i2 <= k && a[0] == k - size_i2 && a[1] == 0 && a[3] == 0 &&
      b[0] == k + 1 - size_i2 && b[1] == 0 && b[2] == size_i2 - 1 && b[3] == 0) {
    return {FamilyTag::WeaklyPeriodicI2, size_i2};
  }
  const int size_i3 = a[3];
  if (size_i3 >= 1 && size_i3 <= k && a[0] == k - size_i3 && a[1] == 0 && a[2] == 0 &&
      b[0] == k + 1 - size_i3 && b[1] == 0 && b[2] == 0 && b[3] == size_i3 - 1) {
    return {FamilyTag::WeaklyPeriodicI3, size_i3};
  }
  return {FamilyTag::NewGeneric, std::nullopt};
}

inline MeasureFamily classify(const SchemeMatrix& m, const FieldPair& fields,
                              double field_tol = kClassifyFieldTol) {
  return classify(m, fields.h, fields.l, field_tol);
}

}  // namespace cayley_gibbs
