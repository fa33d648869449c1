#pragma once

// theta sweeps over scheme matrices: one row per (scheme, theta) with the
// solution count, the representative solution, its family and the
// extremality report. Rows are computed in parallel and emitted in a fixed
// order (scheme lexicographic, then theta ascending).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cayley_gibbs/extremality.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/solver.hpp"
#include "cayley_gibbs/tree_boundary.hpp"

namespace cayley_gibbs {

inline constexpr int kCsvSchema = 1;
inline constexpr std::uint64_t kMaxSweepRows = 10'000'000;

struct ThetaGrid {
  double lo = 0.05;
  double hi = 0.95;
  int steps = 19;

  void validate() const {
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
      throw DomainError("theta grid: need 0 < lo < hi < 1");
    }
    if (steps < 2) {
      throw DomainError("theta grid: steps must be at least 2");
    }
  }

  /// lo + i (hi - lo) / (steps - 1); the last value is hi exactly.
  std::vector<double> values() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      out[i] = lo + i * (hi - lo) / (steps - 1);
    }
    out.back() = hi;
    return out;
  }
};

struct SweepSpec {
  int k = 2;
  ThetaGrid grid;
  // Empty means every scheme of order k.
  std::vector<SchemeMatrix> schemes;
  SolverConfig solver;
  unsigned jobs = 0;  // 0: hardware concurrency

  /// Schemes in row order: explicit lists are sorted and deduplicated.
  std::vector<SchemeMatrix> scheme_list() const {
    if (schemes.empty()) {
      return enumerate_schemes(k);
    }
    std::vector<SchemeMatrix> out = schemes;
    for (const auto& m : out) {
      m.validate();
      if (m.k != k) {
        throw InvalidScheme("sweep: scheme of order " + std::to_string(m.k) + " in a sweep with k=" +
                            std::to_string(k));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct SweepRow {
  SchemeMatrix scheme;
  ReducedParams reduced;
  double theta = 0.0;
  bool criterion = false;
  std::size_t n_solutions = 0;
  MeasureFamily family;
  FieldPair representative;  // largest non-negative solution
  ExtremalityReport report;
  // Solver diagnostics; not part of the CSV row.
  bool incomplete = false;
  std::vector<std::string> warnings;
};

inline SweepRow compute_row(const SchemeMatrix& m, double theta, const SolverConfig& cfg = {}) {
  SweepRow row;
  row.scheme = m;
  row.reduced = reduce(m);
  row.theta = theta;
  row.criterion = nonuniqueness_criterion(row.reduced, theta);
  const SolutionSet set = solve_system(row.reduced, theta, cfg);
  row.n_solutions = set.size();
  row.representative = largest_nonnegative(set);
  row.family = classify(m, row.representative);
  row.report = theorem2_windows(m.k, theta, row.representative, cfg).report;
  row.incomplete = set.incomplete;
  row.warnings = set.warnings;
  return row;
}

/// printf("%.12g").
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline const char* sweep_csv_header() {
  return "k,a1,a2,a3,a4,b1,b2,b3,b4,a,b,c,d,theta,criterion,n_solutions,family,h,l,"
         "kappa_bound,gamma_bound,product,verdict";
}

/// "# schema=1" comment line followed by the header row.
inline void write_csv_preamble(std::ostream& os, const char* header) {
  os << "# schema=" << kCsvSchema << '\n' << header << '\n';
}

inline void write_sweep_row(std::ostream& os, const SweepRow& r) {
  const auto& m = r.scheme;
  os << m.k;
  for (int x : m.a) os << ',' << x;
  for (int x : m.b) os << ',' << x;
  os << ',' << r.reduced.a << ',' << r.reduced.b << ',' << r.reduced.c << ',' << r.reduced.d << ','
     << format_real(r.theta) << ',' << (r.criterion ? "true" : "false") << ',' << r.n_solutions << ','
     << r.family.label() << ',' << format_real(r.representative.h) << ',' << format_real(r.representative.l) << ','
     << format_real(r.report.kappa_bound) << ',' << format_real(r.report.gamma_bound) << ','
     << format_real(r.report.product) << ',' << to_string(r.report.verdict) << '\n';
}

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) {
    return jobs;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Evaluates fn(i) for i in [0, count) on `jobs` threads. The first
/// exception thrown by any call is rethrown after all threads finish.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::uint64_t sweep_row_count(const SweepSpec& spec) {
  const std::uint64_t schemes = spec.schemes.empty() ? scheme_count(spec.k) : spec.schemes.size();
  return schemes * static_cast<std::uint64_t>(std::max(spec.grid.steps, 0));
}

/// Computes all rows and hands them to `sink` in row order. Work proceeds in
/// blocks of whole schemes; each block is finished before its rows are
/// emitted, so output is independent of the thread count.
inline void run_sweep(const SweepSpec& spec, const std::function<void(const SweepRow&)>& sink,
                      std::size_t block_rows = 1 << 14) {
  if (spec.k < 1) {
    throw InvalidScheme("sweep: k must be at least 1");
  }
  spec.grid.validate();
  spec.solver.validate();
  if (sweep_row_count(spec) > kMaxSweepRows) {
    throw CapacityError("sweep: " + std::to_string(sweep_row_count(spec)) + " rows exceed the limit of " +
                        std::to_string(kMaxSweepRows));
  }
  const std::vector<SchemeMatrix> schemes = spec.scheme_list();
  const std::vector<double> thetas = spec.grid.values();
  const std::size_t per_scheme = thetas.size();
  const std::size_t schemes_per_block = std::max<std::size_t>(1, block_rows / per_scheme);
  std::vector<SweepRow> block;
  for (std::size_t s0 = 0; s0 < schemes.size(); s0 += schemes_per_block) {
    const std::size_t s1 = std::min(schemes.size(), s0 + schemes_per_block);
    block.assign((s1 - s0) * per_scheme, SweepRow{});
    parallel_for(block.size(), spec.jobs, [&](std::size_t i) {
      block[i] = compute_row(schemes[s0 + i / per_scheme], thetas[i % per_scheme], spec.solver);
    });
    for (const auto& row : block) sink(row);
  }
}

}  // namespace cayley_gibbs
