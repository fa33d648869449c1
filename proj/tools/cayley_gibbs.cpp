// cayley_gibbs: solve, sweep, enumerate, verify and classify four-valued
// boundary-field Gibbs measures of the Ising model on the Cayley tree.
//
// Exit codes: 0 success, 1 verification failed, 2 invalid matrix or usage,
// 3 invalid theta, 4 I/O error, 5 capacity exceeded.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cayley_gibbs/cayley_gibbs.hpp"

namespace cg = cayley_gibbs;

namespace {

enum Exit : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInvalidMatrix = 2,
  kInvalidTheta = 3,
  kIoError = 4,
  kCapacity = 5,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain key=value lines in the --config file apply to the subcommand being
// run; flags given on the command line win.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto parsed = CLI::ConfigINI::from_config(input);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) {
      return parsed;
    }
    for (auto& item : parsed) {
      if (item.parents.empty() || (item.parents.size() == 1 && item.parents[0] == "default")) {
        item.parents = {subs.front()->get_name()};
      }
    }
    return parsed;
  }

 private:
  const CLI::App* app_;
};

// Output sink: stdout for "-", otherwise a file opened up front so that a bad
// path fails before any work is done.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
      if (!*file_) {
        throw IoError("cannot open " + path_ + " for writing");
      }
    }
  }

  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool is_file() const { return static_cast<bool>(file_); }

  void close() {
    stream().flush();
    if (file_) {
      file_->close();
    }
    if (!stream()) {
      throw IoError("write to " + path_ + " failed");
    }
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

struct SchemeArgs {
  int k = 0;
  std::vector<int> a;
  std::vector<int> b;

  void add_to(CLI::App* sub, bool required = true) {
    auto* ko = sub->add_option("--k", k, "tree order (children per vertex)");
    auto* ao = sub->add_option("--a", a, "counts a1,a2,a3,a4 for +h vertices")->delimiter(',');
    auto* bo = sub->add_option("--b", b, "counts b1,b2,b3,b4 for +l vertices")->delimiter(',');
    if (required) {
      ko->required();
      ao->required();
      bo->required();
    }
  }

  bool given() const { return k != 0 || !a.empty() || !b.empty(); }

  cg::SchemeMatrix matrix() const {
    if (a.size() != 4 || b.size() != 4) {
      throw cg::InvalidScheme("scheme: --a and --b take exactly four comma-separated counts");
    }
    return cg::SchemeMatrix::make(k, {a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
  }
};

struct SolverArgs {
  cg::SolverConfig cfg;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  CLI::Option* lo_opt = nullptr;
  CLI::Option* hi_opt = nullptr;

  void add_to(CLI::App* sub) {
    sub->add_option("--grid-points", cfg.grid_points, "root-scan grid points")->capture_default_str();
    sub->add_option("--bisect-tol", cfg.bisect_tol, "bisection tolerance")->capture_default_str();
    sub->add_option("--residual-tol", cfg.residual_tol, "accepted residual")->capture_default_str();
    sub->add_option("--dedup-tol", cfg.dedup_tol, "distance below which roots merge")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "bisection iteration cap")->capture_default_str();
    lo_opt = sub->add_option("--scan-lo", scan_lo, "lower end of the root scan");
    hi_opt = sub->add_option("--scan-hi", scan_hi, "upper end of the root scan");
  }

  cg::SolverConfig config() const {
    cg::SolverConfig out = cfg;
    if (lo_opt->count() > 0) out.scan_lo = scan_lo;
    if (hi_opt->count() > 0) out.scan_hi = scan_hi;
    out.validate();
    return out;
  }
};

void check_theta(double theta) {
  if (!(std::fabs(theta) < 1.0) || theta == 0.0) {
    throw cg::DomainError("theta must satisfy 0 < |theta| < 1");
  }
}

// "a1,a2,a3,a4/b1,b2,b3,b4"
cg::SchemeMatrix parse_scheme(int k, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    throw cg::InvalidScheme("scheme '" + text + "': expected a1,a2,a3,a4/b1,b2,b3,b4");
  }
  auto row = [&](const std::string& part) {
    std::vector<int> out;
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw cg::InvalidScheme("scheme '" + text + "': bad count '" + item + "'");
      }
    }
    if (out.size() != 4) {
      throw cg::InvalidScheme("scheme '" + text + "': each row needs four counts");
    }
    return std::array<int, 4>{out[0], out[1], out[2], out[3]};
  };
  return cg::SchemeMatrix::make(k, row(text.substr(0, slash)), row(text.substr(slash + 1)));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::string& path, const cg::Json& doc) {
  Output out(path);
  out.stream() << doc.dump(2) << '\n';
  out.close();
}

// ---------------------------------------------------------------------------

struct SolveCmd {
  SchemeArgs scheme;
  SolverArgs solver;
  double theta = 0.0;
  std::string output = "-";

  void add_to(CLI::App& app) {
    auto* sub = app.add_subcommand("solve", "solve the two-field fixed-point system for one scheme");
    scheme.add_to(sub);
    sub->add_option("--theta", theta, "tanh(beta J), 0 < |theta| < 1")->required();
    sub->add_option("--output,-o", output, "JSON destination ('-' for stdout)")->capture_default_str();
    solver.add_to(sub);
    sub->callback([this] { run(); });
  }

  int code = kOk;
  void run() {
    const auto m = scheme.matrix();
    check_theta(theta);
    const auto set = cg::solve_system(cg::reduce(m), theta, solver.config());
    write_json(output, cg::solve_json(m, theta, set));
  }
};

struct SweepCmd {
  int k = 2;
  double lo = 0.05;
  double hi = 0.95;
  int steps = 19;
  std::vector<std::string> schemes;
  std::string output = "-";
  std::string warnings;
  unsigned jobs = 0;
  SolverArgs solver;

  void add_to(CLI::App& app) {
    auto* sub = app.add_subcommand("sweep", "theta sweep over schemes; CSV rows plus a warnings sidecar");
    sub->add_option("--k", k, "tree order")->capture_default_str();
    sub->add_option("--theta-lo", lo, "first theta")->capture_default_str();
    sub->add_option("--theta-hi", hi, "last theta")->capture_default_str();
    sub->add_option("--steps", steps, "number of theta values")->capture_default_str();
    sub->add_option("--scheme", schemes, "a1,a2,a3,a4/b1,b2,b3,b4 (repeatable; default: all schemes)");
    sub->add_option("--output,-o", output, "CSV destination ('-' for stdout)")->capture_default_str();
    sub->add_option("--warnings", warnings, "sidecar JSON path (default: <output>.warnings.json)");
    sub->add_option("--jobs,-j", jobs, "worker threads (0: all cores)")->capture_default_str();
    solver.add_to(sub);
    sub->callback([this] { run(); });
  }

  void run() {
    cg::SweepSpec spec;
    spec.k = k;
    if (k < 1) {
      throw cg::InvalidScheme("sweep: k must be at least 1");
    }
    spec.grid = {lo, hi, steps};
    spec.grid.validate();
    for (const auto& s : schemes) {
      spec.schemes.push_back(parse_scheme(k, s));
    }
    spec.solver = solver.config();
    spec.jobs = jobs;
    if (cg::sweep_row_count(spec) > cg::kMaxSweepRows) {
      throw cg::CapacityError("sweep: " + std::to_string(cg::sweep_row_count(spec)) + " rows exceed " +
                              std::to_string(cg::kMaxSweepRows));
    }

    Output out(output);
    std::string sidecar = warnings;
    if (sidecar.empty() && out.is_file()) {
      sidecar = output + ".warnings.json";
    }
    cg::Json notes = cg::Json::array();
    std::size_t rows = 0;
    std::size_t incomplete = 0;
    cg::write_csv_preamble(out.stream(), cg::sweep_csv_header());
    cg::run_sweep(spec, [&](const cg::SweepRow& row) {
      cg::write_sweep_row(out.stream(), row);
      ++rows;
      if (row.incomplete) ++incomplete;
      if (!row.warnings.empty() || row.incomplete) {
        notes.push_back(cg::Json{{"scheme", cg::scheme_json(row.scheme)},
                                 {"theta", row.theta},
                                 {"incomplete", row.incomplete},
                                 {"messages", row.warnings}});
      }
    });
    out.close();
    if (!sidecar.empty()) {
      cg::Json doc;
      doc["schema"] = cg::kCsvSchema;
      doc["generated_at"] = utc_timestamp();
      doc["rows"] = rows;
      doc["incomplete_rows"] = incomplete;
      doc["warnings"] = std::move(notes);
      write_json(sidecar, doc);
    }
  }
};

struct EnumerateCmd {
  int k = 2;
  std::string output = "-";

  void add_to(CLI::App& app) {
    auto* sub = app.add_subcommand("enumerate", "list every scheme of order k with its reduction and family");
    sub->add_option("--k", k, "tree order (1..8)")->required();
    sub->add_option("--output,-o", output, "CSV destination ('-' for stdout)")->capture_default_str();
    sub->callback([this] { run(); });
  }

  void run() {
    if (k < 1) {
      throw cg::InvalidScheme("enumerate: k must be at least 1");
    }
    if (k > 8) {
      throw cg::CapacityError("enumerate: k=" + std::to_string(k) + " exceeds 8 (" +
                              std::to_string(cg::scheme_count(k)) + " schemes)");
    }
    Output out(output);
    auto& os = out.stream();
    cg::write_csv_preamble(os, "k,a1,a2,a3,a4,b1,b2,b3,b4,a,b,c,d,family");
    cg::for_each_scheme(k, [&](const cg::SchemeMatrix& m) {
      const auto r = cg::reduce(m);
      os << m.k;
      for (int x : m.a) os << ',' << x;
      for (int x : m.b) os << ',' << x;
      os << ',' << r.a << ',' << r.b << ',' << r.c << ',' << r.d << ',' << cg::classify(m, 0.0, 0.0).label() << '\n';
    });
    out.close();
  }
};

struct VerifyCmd {
  SchemeArgs scheme;
  SolverArgs solver;
  double theta = 0.0;
  int depth = 3;
  int solution = -1;
  std::string root_label = "+H";
  double perturb_h = 0.0;
  double perturb_l = 0.0;
  std::string export_path;
  std::string assignment_path;
  std::string output = "-";
  bool passed = true;

  void add_to(CLI::App& app) {
    auto* sub = app.add_subcommand("verify", "brute-force checks of one solution on a finite tree");
    scheme.add_to(sub, false);
    sub->add_option("--theta", theta, "tanh(beta J), 0 < |theta| < 1")->required();
    sub->add_option("--depth,-n", depth, "tree depth n")->capture_default_str();
    sub->add_option("--solution", solution,
                    "index into the sorted solution list (default: largest non-negative pair)");
    sub->add_option("--root-label", root_label, "+H, -H, +L or -L")->capture_default_str();
    sub->add_option("--perturb-h", perturb_h, "added to h before verifying")->capture_default_str();
    sub->add_option("--perturb-l", perturb_l, "added to l before verifying")->capture_default_str();
    sub->add_option("--export", export_path, "write the boundary assignment to this file");
    sub->add_option("--assignment", assignment_path, "verify a previously exported assignment instead");
    sub->add_option("--output,-o", output, "JSON destination ('-' for stdout)")->capture_default_str();
    solver.add_to(sub);
    sub->callback([this] { run(); });
  }

  cg::BoundaryAssignment build() const {
    if (!assignment_path.empty()) {
      std::ifstream in(assignment_path);
      if (!in) {
        throw IoError("cannot open " + assignment_path);
      }
      auto a = cg::read_assignment(in);
      return a.with_values({a.values().h + perturb_h, a.values().l + perturb_l});
    }
    if (!scheme.given()) {
      throw cg::InvalidScheme("verify: --k, --a and --b are required unless --assignment is given");
    }
    const auto m = scheme.matrix();
    if (depth < 1) {
      throw std::invalid_argument("verify: depth must be at least 1");
    }
    // Fail on capacity before solving.
    const auto tree = std::make_shared<const cg::FiniteTree>(m.k, depth);
    if (tree->size() > cg::kOracleSpinCap) {
      throw cg::CapacityError("verify: |V_n| = " + std::to_string(tree->size()) + " exceeds the oracle cap of " +
                              std::to_string(cg::kOracleSpinCap) + " spins");
    }
    const auto set = cg::solve_system(cg::reduce(m), theta, solver.config());
    cg::FieldPair p = cg::largest_nonnegative(set);
    if (solution >= 0) {
      if (static_cast<std::size_t>(solution) >= set.size()) {
        throw std::invalid_argument("verify: --solution " + std::to_string(solution) + " out of range (" +
                                    std::to_string(set.size()) + " solutions)");
      }
      p = set.solutions[static_cast<std::size_t>(solution)];
    }
    p.h += perturb_h;
    p.l += perturb_l;
    return cg::assign_fields(tree, m, cg::parse_label(root_label), p);
  }

  void run() {
    check_theta(theta);
    const auto assignment = build();
    if (!export_path.empty()) {
      Output ex(export_path);
      cg::write_assignment(ex.stream(), assignment);
      ex.close();
    }
    const auto v = cg::verify_assignment(assignment, theta);
    write_json(output, cg::verify_json(assignment, theta, v));
    passed = v.pass;
  }
};

struct ClassifyCmd {
  SchemeArgs scheme;
  SolverArgs solver;
  double theta = 0.0;
  double h = 0.0;
  double l = 0.0;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* h_opt = nullptr;
  CLI::Option* l_opt = nullptr;
  std::string output = "-";

  void add_to(CLI::App& app) {
    auto* sub = app.add_subcommand("classify", "family of each solution, or of an explicit (h, l)");
    sub->set_help_flag("--help", "Print this help message and exit");
    scheme.add_to(sub);
    theta_opt = sub->add_option("--theta", theta, "solve at this theta and classify every solution");
    h_opt = sub->add_option("--h", h, "explicit h");
    l_opt = sub->add_option("--l", l, "explicit l");
    h_opt->needs(l_opt);
    l_opt->needs(h_opt);
    h_opt->excludes(theta_opt);
    sub->add_option("--output,-o", output, "JSON destination ('-' for stdout)")->capture_default_str();
    solver.add_to(sub);
    sub->callback([this] { run(); });
  }

  void run() {
    const auto m = scheme.matrix();
    if (h_opt->count() > 0) {
      if (!std::isfinite(h) || !std::isfinite(l)) {
        throw std::invalid_argument("classify: h and l must be finite");
      }
      write_json(output, cg::classify_json(m, {{h, l}}));
      return;
    }
    if (theta_opt->count() == 0) {
      throw std::invalid_argument("classify: give either --theta or both --h and --l");
    }
    check_theta(theta);
    const auto set = cg::solve_system(cg::reduce(m), theta, solver.config());
    write_json(output, cg::classify_json(m, set.solutions, theta));
  }
};

int report(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-valued boundary-field Gibbs measures of the Ising model on the Cayley tree"};
  app.set_config("--config", "", "key=value file; keys are long option names, flags override them");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  SolveCmd solve;
  SweepCmd sweep;
  EnumerateCmd enumerate;
  VerifyCmd verify;
  ClassifyCmd classify;
  solve.add_to(app);
  sweep.add_to(app);
  enumerate.add_to(app);
  verify.add_to(app);
  classify.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    return report(e, kIoError);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidMatrix;
  } catch (const cg::InvalidScheme& e) {
    return report(e, kInvalidMatrix);
  } catch (const cg::DomainError& e) {
    return report(e, kInvalidTheta);
  } catch (const cg::CapacityError& e) {
    return report(e, kCapacity);
  } catch (const IoError& e) {
    return report(e, kIoError);
  } catch (const cg::FormatError& e) {
    return report(e, kIoError);
  } catch (const std::invalid_argument& e) {
    return report(e, kInvalidMatrix);
  } catch (const std::exception& e) {
    return report(e, kIoError);
  }
  if (app.got_subcommand("verify") && !verify.passed) {
    return kVerifyFailed;
  }
  return kOk;
}
