#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cayley_gibbs/sweep.hpp"

using namespace cayley_gibbs;

namespace {

std::vector<SweepRow> collect(const SweepSpec& spec, std::size_t block_rows = 1 << 14) {
  std::vector<SweepRow> rows;
  run_sweep(spec, [&](const SweepRow& r) { rows.push_back(r); }, block_rows);
  return rows;
}

std::string csv(const SweepSpec& spec, std::size_t block_rows = 1 << 14) {
  std::ostringstream os;
  write_csv_preamble(os, sweep_csv_header());
  run_sweep(spec, [&](const SweepRow& r) { write_sweep_row(os, r); }, block_rows);
  return os.str();
}

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST(ThetaGrid, DefaultValues) {
  const auto v = ThetaGrid{}.values();
  ASSERT_EQ(v.size(), 19u);
  for (int i = 0; i < 19; ++i) {
    EXPECT_NEAR(v[i], 0.05 * (i + 1), 1e-15);
  }
  EXPECT_EQ(v.front(), 0.05);
  EXPECT_EQ(v.back(), 0.95);
}

TEST(ThetaGrid, Validation) {
  EXPECT_THROW((ThetaGrid{0.0, 0.5, 3}.validate()), DomainError);
  EXPECT_THROW((ThetaGrid{0.5, 0.5, 3}.validate()), DomainError);
  EXPECT_THROW((ThetaGrid{0.1, 1.0, 3}.validate()), DomainError);
  EXPECT_THROW((ThetaGrid{0.1, 0.9, 1}.validate()), DomainError);
  EXPECT_NO_THROW((ThetaGrid{0.1, 0.9, 2}.validate()));
}

TEST(FormatReal, TwelveSignificantDigits) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(-2.0634370688955605), "-2.0634370689");
  EXPECT_EQ(format_real(1e-20), "1e-20");
}

TEST(Sweep, FullK2GridHas1900RowsInOrder) {
  SweepSpec spec;
  const auto rows = collect(spec);
  ASSERT_EQ(rows.size(), 1900u);
  EXPECT_EQ(sweep_row_count(spec), 1900u);
  const auto thetas = spec.grid.values();
  const auto schemes = enumerate_schemes(2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].scheme, schemes[i / 19]);
    EXPECT_EQ(rows[i].theta, thetas[i % 19]);
    EXPECT_GE(rows[i].n_solutions, 1u);
    EXPECT_FALSE(rows[i].incomplete);
  }
}

// X > 1 forces at least three solutions; the opposite tail X < -1 does not.
TEST(Sweep, PositiveCriterionGivesAtLeastThreeSolutions) {
  SweepSpec spec;
  std::size_t negative_tail = 0;
  for (const auto& r : collect(spec)) {
    const double x = criterion_value(r.reduced, r.theta);
    if (x > 1.0) {
      EXPECT_GE(r.n_solutions, 3u) << r.reduced.a << r.reduced.b << r.reduced.c << r.reduced.d << " " << r.theta;
    }
    if (x < -1.0 && r.n_solutions == 1) ++negative_tail;
  }
  EXPECT_GT(negative_tail, 0u);
}

TEST(Sweep, TranslationInvariantTransitionAtHalf) {
  SweepSpec spec;
  spec.schemes = {SchemeMatrix::make(2, {2, 0, 0, 0}, {0, 0, 2, 0})};
  spec.grid = {0.45, 0.55, 3};
  const auto rows = collect(spec);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].n_solutions, 1u);
  EXPECT_FALSE(rows[0].criterion);
  EXPECT_EQ(rows[2].n_solutions, 9u);
  // (a,b,c,d) = (2,0,0,2): X = 4 theta (1 - theta) never exceeds 1, so the
  // sufficient criterion stays false on both sides of the transition.
  EXPECT_FALSE(rows[2].criterion);
  EXPECT_GT(rows[2].representative.h, 0.0);
  EXPECT_EQ(rows[2].family.tag, FamilyTag::TranslationInvariant);
}

TEST(Sweep, OutputIndependentOfJobsAndBlocks) {
  SweepSpec spec;
  spec.grid = {0.1, 0.9, 9};
  spec.jobs = 1;
  const std::string serial = csv(spec);
  spec.jobs = 4;
  EXPECT_EQ(csv(spec), serial);
  EXPECT_EQ(csv(spec, 7), serial);
  spec.jobs = 3;
  EXPECT_EQ(csv(spec, 1), serial);
}

TEST(Sweep, CsvLayout) {
  SweepSpec spec;
  spec.schemes = {SchemeMatrix::make(2, {2, 0, 0, 0}, {0, 0, 2, 0}), SchemeMatrix::make(2, {1, 1, 0, 0}, {0, 0, 1, 1})};
  spec.grid = {0.25, 0.75, 3};
  const std::string out = csv(spec);
  EXPECT_EQ(out.find('\r'), std::string::npos);
  std::istringstream is(out);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# schema=1");
  std::getline(is, line);
  EXPECT_EQ(line, sweep_csv_header());
  const std::size_t columns = count(line, ',') + 1;
  EXPECT_EQ(columns, 23u);
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(count(line, ',') + 1, columns) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 6);
  // Explicit lists are emitted in scheme order: (1,1,0,0) sorts first.
  EXPECT_EQ(out.find("2,1,1,0,0,0,0,1,1,"), out.find('\n', out.find('\n') + 1) + 1);
  EXPECT_NE(out.find("2,2,0,0,0,0,0,2,0,2,0,0,2,0.75,false,9,"), std::string::npos);
}

TEST(Sweep, Errors) {
  SweepSpec spec;
  spec.k = 0;
  EXPECT_THROW(collect(spec), InvalidScheme);
  spec.k = 30;
  EXPECT_THROW(collect(spec), CapacityError);
  spec.k = 3;
  spec.schemes = {SchemeMatrix::make(2, {2, 0, 0, 0}, {0, 0, 2, 0})};
  EXPECT_THROW(collect(spec), InvalidScheme);
  spec.k = 2;
  spec.grid = {0.9, 0.1, 3};
  EXPECT_THROW(collect(spec), DomainError);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_EQ(resolve_jobs(3), 3u);
  EXPECT_GE(resolve_jobs(0), 1u);
}
