#pragma once

// JSON documents produced by the command-line tool. Keys are emitted in
// insertion order, so the layout below is the output layout.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cayley_gibbs/gibbs_oracle.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/solver.hpp"
#include "cayley_gibbs/tree_boundary.hpp"

namespace cayley_gibbs {

using Json = nlohmann::ordered_json;

inline constexpr double kCompatibilityTol = 1e-9;
inline constexpr double kRootRatioTol = 1e-10;

inline Json scheme_json(const SchemeMatrix& m) {
  return Json{{"k", m.k}, {"a", m.a}, {"b", m.b}};
}

inline Json reduced_json(const ReducedParams& r) {
  return Json{{"a", r.a}, {"b", r.b}, {"c", r.c}, {"d", r.d}};
}

inline Json family_json(const MeasureFamily& f) {
  Json j{{"tag", std::string(to_string(f.tag))}, {"label", f.label()}};
  j["param"] = f.param ? Json(*f.param) : Json(nullptr);
  return j;
}

inline Json solve_json(const SchemeMatrix& m, double theta, const SolutionSet& set) {
  const ReducedParams r = reduce(m);
  Json out;
  out["reduced"] = reduced_json(r);
  out["criterion"] = nonuniqueness_criterion(r, theta);
  Json sols = Json::array();
  for (const FieldPair& p : set.solutions) {
    sols.push_back(Json{{"h", p.h}, {"l", p.l}, {"residual", system_residual(r, theta, p)}});
  }
  out["solutions"] = std::move(sols);
  const FieldPair rep = largest_nonnegative(set);
  out["family"] = classify(m, rep).label();
  out["scheme"] = scheme_json(m);
  out["theta"] = theta;
  out["criterion_value"] = criterion_value(r, theta);
  out["representative"] = Json{{"h", rep.h}, {"l", rep.l}};
  out["grid_points"] = set.grid_points;
  out["incomplete"] = set.incomplete;
  out["boundary_degenerate"] = set.boundary_degenerate;
  out["warnings"] = set.warnings;
  return out;
}

inline Json classify_json(const SchemeMatrix& m, const std::vector<FieldPair>& pairs,
                          std::optional<double> theta = std::nullopt) {
  Json out;
  out["scheme"] = scheme_json(m);
  out["reduced"] = reduced_json(reduce(m));
  out["theta"] = theta ? Json(*theta) : Json(nullptr);
  Json rows = Json::array();
  for (const FieldPair& p : pairs) {
    Json row{{"h", p.h}, {"l", p.l}};
    row["family"] = family_json(classify(m, p));
    rows.push_back(std::move(row));
  }
  out["classifications"] = std::move(rows);
  return out;
}

/// The three brute-force checks run by `verify` on one assignment.
struct Verification {
  CompatibilityReport compatibility;
  KolmogorovReport kolmogorov;
  double root_ratio = 1.0;
  double root_ratio_expected = 1.0;
  double root_ratio_deviation = 0.0;  // |observed / expected - 1|
  bool root_ratio_pass = true;
  bool pass = true;
};

/// Compatibility on the whole tree, Kolmogorov consistency of mu_n against
/// mu_{n-1}, and the root marginal ratio of mu_n against exp(-2 h_root),
/// where n is the tree depth.
inline Verification verify_assignment(const BoundaryAssignment& assignment, double theta) {
  const FiniteTree& t = assignment.tree();
  const int n = t.depth();
  if (n < 1) {
    throw std::invalid_argument("verify: depth must be at least 1");
  }
  detail::check_capacity(t.ball_size(n));
  const Coupling coupling = Coupling::from_theta(theta);
  Verification v;
  v.compatibility = verify_compatibility(assignment, theta, kCompatibilityTol);
  const auto mu = finite_volume_measure(assignment, coupling, n);
  const auto mu_prev = finite_volume_measure(assignment, coupling, n - 1);
  v.kolmogorov = check_kolmogorov(mu, mu_prev, kKolmogorovTol);
  const MarginalRatio ratio = root_marginal_ratio(mu);
  v.root_ratio = ratio.ratio;
  v.root_ratio_expected = std::exp(-2.0 * numeric_field(assignment, 0));
  v.root_ratio_deviation = std::fabs(v.root_ratio / v.root_ratio_expected - 1.0);
  v.root_ratio_pass = !ratio.plus_underflow && v.root_ratio_deviation < kRootRatioTol;
  v.pass = v.compatibility.pass && v.kolmogorov.pass && v.root_ratio_pass;
  return v;
}

inline Json verify_json(const BoundaryAssignment& assignment, double theta, const Verification& v) {
  const FiniteTree& t = assignment.tree();
  Json out;
  out["k"] = t.k();
  out["depth"] = t.depth();
  out["theta"] = theta;
  out["h"] = assignment.values().h;
  out["l"] = assignment.values().l;
  out["root_label"] = std::string(to_string(assignment.label(0)));
  out["compatibility"] = Json{{"max_residual", v.compatibility.max_residual},
                              {"worst_vertex", v.compatibility.worst_vertex},
                              {"tolerance", kCompatibilityTol},
                              {"pass", v.compatibility.pass}};
  out["kolmogorov"] = Json{{"max_discrepancy", v.kolmogorov.max_discrepancy},
                           {"tolerance", kKolmogorovTol},
                           {"pass", v.kolmogorov.pass}};
  out["root_ratio"] = Json{{"observed", v.root_ratio},
                           {"expected", v.root_ratio_expected},
                           {"relative_deviation", v.root_ratio_deviation},
                           {"tolerance", kRootRatioTol},
                           {"pass", v.root_ratio_pass}};
  out["pass"] = v.pass;
  return out;
}

}  // namespace cayley_gibbs
