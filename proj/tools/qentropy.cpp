// qentropy command-line front end.
//
// Exit codes: 0 when every certificate passes, 1 when one fails, 2 for unreadable
// or invalid input (the message names the violated invariant).

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qentropy/qentropy.hpp"

namespace fs = std::filesystem;
using namespace qentropy;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;
constexpr int kLabelWidth = 40;

/// Input problem that maps to exit code 2.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double default_tolerance() {
  const char* env = std::getenv("QE_AUDIT_TOL");
  if (env == nullptr || *env == '\0') return kDefaultTolerance;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v >= 0.0)) {
    throw InvalidInput(std::string("QE_AUDIT_TOL must be a nonnegative number, got '") + env + "'");
  }
  return v;
}

TensorShape parse_shape(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidInput("bad shape '" + text + "' (expected e.g. 2x3)");
    }
    dims.push_back(std::stoul(part));
  }
  try {
    return TensorShape(std::move(dims));
  } catch (const Error& e) {
    throw InvalidInput("bad shape '" + text + "': " + e.what());
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

struct LoadedState {
  TensorShape shape;
  DensityMatrix rho;
};

LoadedState load_state(const std::string& path) {
  auto file = io::read_matrix_file(path);
  try {
    auto rho = validate_density(file.matrix);
    return {std::move(file.shape), std::move(rho)};
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what(), e.defect());
  }
}

void print_number(std::ostream& os, const std::string& label, double v) {
  os << "  " << std::left << std::setw(kLabelWidth) << label << std::setprecision(12) << v << "\n";
}

void print_certificate(const Certificate& c) {
  std::cout << c.name << "\n";
  if (c.infinite_lhs) {
    std::cout << "  " << std::left << std::setw(kLabelWidth) << "lhs" << "+inf\n";
  } else {
    print_number(std::cout, "lhs", c.lhs);
  }
  for (const auto& b : c.bounds) print_number(std::cout, "bound " + b.label, b.value);
  for (const auto& s : c.slacks) print_number(std::cout, "slack " + s.label, s.value);
  for (const auto& r : c.residuals) {
    std::ostringstream label;
    label << "residual " << r.label;
    if (r.limit) label << " (<= " << *r.limit << ")";
    print_number(std::cout, label.str(), r.value);
  }
  for (const auto& n : c.notes) std::cout << "  note: " << n << "\n";
  std::cout << "  " << std::left << std::setw(kLabelWidth) << "verdict" << (c.pass() ? "pass" : "FAIL") << "\n";
}

int emit_certificate(const Certificate& c, bool json) {
  if (json) {
    std::cout << io::certificate_to_json(c).dump(2) << "\n";
  } else {
    print_certificate(c);
  }
  return c.pass() ? kExitPass : kExitFail;
}

void require_files(const std::vector<std::string>& files, std::size_t n, const std::string& check) {
  if (files.size() != n) {
    std::ostringstream os;
    os << "check " << check << " takes " << n << " matrix file" << (n == 1 ? "" : "s") << ", got " << files.size();
    throw InvalidInput(os.str());
  }
}

TensorShape bipartite(const TensorShape& shape) { return shape.size() == 2 ? shape : shape.first_vs_rest(); }

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::vector<std::string> files;
  std::string check;
  bool json = false;
  std::optional<double> tol;
  std::uint64_t channel_seed = 1;
  std::size_t kraus = 4;
  std::size_t out_dim = 0;
};

int cmd_verify(const VerifyOptions& o) {
  const double tol = o.tol.value_or(default_tolerance());
  const auto& f = o.files;

  if (o.check == "subadditivity") {
    require_files(f, 1, o.check);
    const auto s = load_state(f[0]);
    return emit_certificate(subadditivity_certificate(s.rho, bipartite(s.shape), tol), o.json);
  }
  if (o.check == "multipartite") {
    require_files(f, 1, o.check);
    const auto s = load_state(f[0]);
    return emit_certificate(multipartite_certificate(s.rho, s.shape, tol), o.json);
  }
  if (o.check == "divergence_bounds") {
    require_files(f, 2, o.check);
    const auto a = load_state(f[0]), b = load_state(f[1]);
    return emit_certificate(divergence_bounds_certificate(a.rho, b.rho, tol), o.json);
  }
  if (o.check == "monotonicity" || o.check == "equality") {
    require_files(f, 2, o.check);
    const auto a = load_state(f[0]), b = load_state(f[1]);
    const auto shape = bipartite(a.shape);
    return emit_certificate(o.check == "equality" ? equality_certificate(a.rho, b.rho, shape, tol)
                                                  : monotonicity_certificate(a.rho, b.rho, shape, tol),
                            o.json);
  }
  if (o.check == "gt3") {
    // rho1 is the first marginal of the first file; sigma1 that of the second.
    require_files(f, 2, o.check);
    const auto a = load_state(f[0]), b = load_state(f[1]);
    const auto shape = bipartite(b.shape);
    const auto rho1 = marginal(a.rho, bipartite(a.shape), {0});
    return emit_certificate(gt3_certificate(rho1, marginal(b.rho, shape, {0}), b.rho, shape, tol), o.json);
  }
  if (o.check == "proofstep") {
    // First file: a full-rank state e^{-H}. Second file: any Hermitian A.
    require_files(f, 2, o.check);
    const auto gibbs = load_state(f[0]);
    const auto a = io::read_matrix_file(f[1]);
    const HermitianMatrix h = -1.0 * logm(gibbs.rho.matrix());
    return emit_certificate(proofstep_certificate(h, HermitianMatrix(a.matrix), tol), o.json);
  }
  if (o.check == "data_processing") {
    require_files(f, 2, o.check);
    const auto a = load_state(f[0]), b = load_state(f[1]);
    const std::size_t out = o.out_dim == 0 ? a.shape[0] : o.out_dim;
    const auto channel = random_channel(a.rho.dim(), out, o.kraus, o.channel_seed);
    return emit_certificate(data_processing_certificate(a.rho, b.rho, channel, tol), o.json);
  }
  throw InvalidInput("unknown check '" + o.check + "'");
}

// ---------------------------------------------------------------------------
// slater

int cmd_slater(std::size_t n, const std::string& out, bool json) {
  const double tol = default_tolerance();
  const auto row = slater_row(n, tol);
  if (!out.empty()) {
    const auto pair = slater_pair(n);
    fs::create_directories(out);
    io::write_matrix_file(fs::path(out) / "rho.json", pair.rho.matrix(), pair.shape);
    io::write_matrix_file(fs::path(out) / "sigma.json", pair.sigma.matrix(), pair.shape);
  }
  if (json) {
    std::cout << to_json(row).dump(2) << "\n";
  } else {
    const double nd = static_cast<double>(n);
    std::cout << "Slater pair N = " << n << " (dimension " << n * n << ")\n";
    print_number(std::cout, "D(rho||sigma)", row.divergence);
    print_number(std::cout, "  closed form ln(2N/(N-1))", std::log(2.0 * nd / (nd - 1.0)));
    print_number(std::cout, "trace distance (1/2)Tr|rho-sigma|", 0.5 * row.trace_norm);
    print_number(std::cout, "trace norm Tr|rho-sigma|", row.trace_norm);
    print_number(std::cout, "root overlap Tr sqrt(rho)sqrt(sigma)", row.overlap);
    print_number(std::cout, "mutual information", row.mutual_information);
    print_number(std::cout, "bound renyi", row.renyi_bound);
    print_number(std::cout, "bound pinsker", row.pinsker_bound);
    print_number(std::cout, "bound hs", row.hs_bound);
    print_number(std::cout, "slack renyi", row.renyi_slack);
    std::cout << "  " << std::left << std::setw(kLabelWidth) << "verdict" << (row.pass ? "pass" : "FAIL") << "\n";
    if (!out.empty()) std::cout << "wrote " << (fs::path(out) / "rho.json").string() << ", sigma.json\n";
  }
  return row.pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string checks;
  std::string dims;
  std::size_t trials = 200;
  std::uint64_t seed = 20140307;
  double eps_mix = 1e-6;
  std::optional<double> tol;
  std::string report;
  std::size_t slater = 0;
  std::size_t equality = 0;
  std::size_t threads = 1;
  bool timing = false;
  bool json = false;
};

void print_stats_line(const CheckStats& s) {
  std::cout << "  " << std::left << std::setw(18) << s.check << std::setw(8) << s.shape << std::right << std::setw(6)
            << s.count << " trials  " << std::setw(4) << s.failures << " fail  " << std::setw(4) << s.errors
            << " err  min_slack " << std::setprecision(6) << std::setw(13) << s.min_slack << "  max_residual "
            << std::setw(11) << s.max_residual << "\n";
}

int cmd_sweep(const SweepOptions& o) {
  SweepConfig cfg;
  if (!o.checks.empty()) {
    cfg.checks.clear();
    for (const auto& name : split(o.checks, ',')) {
      const auto c = parse_check(name);
      if (!c) throw InvalidInput("unknown check '" + name + "'");
      cfg.checks.push_back(*c);
    }
  }
  if (!o.dims.empty()) {
    cfg.shapes.clear();
    for (const auto& d : split(o.dims, ',')) cfg.shapes.push_back(parse_shape(d));
  }
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.eps_mix = o.eps_mix;
  cfg.tolerance = o.tol.value_or(default_tolerance());
  cfg.slater_n_max = o.slater;
  cfg.equality_trials = o.equality;
  cfg.threads = o.threads;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw InvalidInput(e.what());
  }

  const auto report = run_sweep(cfg);
  const auto doc = to_json(report, o.timing);
  if (!o.report.empty()) io::write_file_atomically(o.report, doc.dump(2) + "\n");

  if (o.json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "sweep seed " << cfg.seed << ", " << cfg.trials << " trials per check and shape\n";
    for (const auto& row : report.rows) print_stats_line(row);
    if (report.equality) print_stats_line(*report.equality);
    for (const auto& r : report.slater)
      std::cout << "  slater N=" << r.n << "  renyi_slack " << r.renyi_slack << "  " << (r.pass ? "pass" : "FAIL")
                << "\n";
    std::cout << "total " << report.total_count() << " certificates, " << report.total_failures() << " failures, "
              << report.total_errors() << " errors\n";
    auto flag = [](const CheckStats& s) {
      if (s.failures > 0)
        std::cout << "  worst " << s.check << " " << s.shape << ": trial " << s.worst_trial << " seed 0x" << std::hex
                  << s.worst_seed << std::dec << "\n";
      if (s.errors > 0) std::cout << "  first error " << s.check << " " << s.shape << ": " << s.first_error << "\n";
    };
    for (const auto& row : report.rows) flag(row);
    if (report.equality) flag(*report.equality);
    if (o.timing) std::cout << "wall time " << report.wall_seconds << " s\n";
  }
  return report.ok() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// equality-family

BlockSpec parse_blocks(const std::string& text) {
  BlockSpec spec;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 4) throw InvalidInput("block '" + item + "' must be q:r:left_dim:right_dim");
    EqualityBlock b;
    try {
      b.q = std::stod(parts[0]);
      b.r = std::stod(parts[1]);
      b.left_dim = std::stoul(parts[2]);
      b.right_dim = std::stoul(parts[3]);
    } catch (const std::exception&) {
      throw InvalidInput("block '" + item + "' has a non-numeric field");
    }
    spec.blocks.push_back(std::move(b));
  }
  return spec;
}

int cmd_equality_family(const std::string& blocks, std::uint64_t seed, const std::string& out, bool json) {
  BlockSpec spec;
  std::uint64_t family_seed = seed;
  if (blocks.empty()) {
    SplitMix64 rng(seed);
    spec = random_block_spec(rng);
    family_seed = rng.next();
  } else {
    spec = parse_blocks(blocks);
  }
  const auto inst = equality_family(spec, family_seed);
  if (!out.empty()) {
    fs::create_directories(out);
    io::write_matrix_file(fs::path(out) / "rho12.json", inst.rho12.matrix(), inst.shape);
    io::write_matrix_file(fs::path(out) / "sigma12.json", inst.sigma12.matrix(), inst.shape);
  }
  if (json) {
    nlohmann::json doc = {{"dims", inst.shape.dims()}, {"blocks", spec.blocks.size()}, {"residual", inst.residual}};
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "equality family: " << spec.blocks.size() << " block(s), dims " << inst.shape.to_string() << "\n";
    print_number(std::cout, "log-difference residual", inst.residual);
    if (!out.empty()) std::cout << "wrote " << (fs::path(out) / "rho12.json").string() << ", sigma12.json\n";
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// petz-check

int cmd_petz_check(const std::string& rho_path, const std::string& sigma_path, bool json, std::optional<double> tol) {
  const auto a = load_state(rho_path), b = load_state(sigma_path);
  return emit_certificate(equality_certificate(a.rho, b.rho, bipartite(a.shape), tol.value_or(default_tolerance())),
                          json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy functionals and certificates for finite-dimensional quantum states"};
  app.require_subcommand(1);

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Certify one inequality on matrix files");
  v->add_option("files", verify.files, "Matrix files")->required();
  v->add_option("--check", verify.check,
                "subadditivity | multipartite | divergence_bounds | monotonicity | equality | gt3 | proofstep | "
                "data_processing")
      ->required();
  v->add_flag("--json", verify.json, "Print the certificate as JSON");
  v->add_option("--tol", verify.tol, "Slack tolerance (default 1e-8 or QE_AUDIT_TOL)");
  v->add_option("--channel-seed", verify.channel_seed, "Seed of the random channel for data_processing");
  v->add_option("--kraus", verify.kraus, "Number of Kraus operators for data_processing");
  v->add_option("--out-dim", verify.out_dim, "Channel output dimension (default: first subsystem)");

  std::size_t slater_n = 0;
  std::string slater_out;
  bool slater_json = false;
  auto* s = app.add_subcommand("slater", "Closed-form Slater example");
  s->add_option("--n", slater_n, "Particle number N (2..11)")->required();
  s->add_option("--out", slater_out, "Directory for rho.json and sigma.json");
  s->add_flag("--json", slater_json, "Print the row as JSON");

  SweepOptions sweep;
  auto* w = app.add_subcommand("sweep", "Seeded randomized sweep of every certificate");
  w->add_option("--checks", sweep.checks, "Comma-separated checks (default: all)");
  w->add_option("--dims", sweep.dims, "Comma-separated shapes such as 2x2,2x3 (default: 2x2,2x3,3x3,2x2x2)");
  w->add_option("--trials", sweep.trials, "Trials per check and shape");
  w->add_option("--seed", sweep.seed, "Base seed");
  w->add_option("--eps-mix", sweep.eps_mix, "Mixing with I/d for inputs that must be full rank");
  w->add_option("--tol", sweep.tol, "Slack tolerance (default 1e-8 or QE_AUDIT_TOL)");
  w->add_option("--report", sweep.report, "Write the JSON report here");
  w->add_option("--slater", sweep.slater, "Add Slater rows for N = 2..value");
  w->add_option("--equality", sweep.equality, "Add this many equality-family trials");
  w->add_option("--threads", sweep.threads, "Worker threads (results do not depend on it)");
  w->add_flag("--timing", sweep.timing, "Include wall time in the report");
  w->add_flag("--json", sweep.json, "Print the report as JSON");

  std::string blocks, family_out;
  std::uint64_t family_seed = 1;
  bool family_json = false;
  auto* e = app.add_subcommand("equality-family", "Emit a pair that saturates monotonicity");
  e->add_option("--blocks", blocks, "Comma-separated q:r:left_dim:right_dim (default: random)");
  e->add_option("--seed", family_seed, "Seed");
  e->add_option("--out", family_out, "Directory for rho12.json and sigma12.json");
  e->add_flag("--json", family_json, "Print a JSON summary");

  std::string petz_rho, petz_sigma;
  bool petz_json = false;
  std::optional<double> petz_tol;
  auto* p = app.add_subcommand("petz-check", "Compare the Petz and log-difference equality conditions");
  p->add_option("rho12", petz_rho, "State rho12")->required();
  p->add_option("sigma12", petz_sigma, "State sigma12")->required();
  p->add_flag("--json", petz_json, "Print the certificate as JSON");
  p->add_option("--tol", petz_tol, "Slack tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitInvalid;
  }

  try {
    if (*v) return cmd_verify(verify);
    if (*s) return cmd_slater(slater_n, slater_out, slater_json);
    if (*w) return cmd_sweep(sweep);
    if (*e) return cmd_equality_family(blocks, family_seed, family_out, family_json);
    if (*p) return cmd_petz_check(petz_rho, petz_sigma, petz_json, petz_tol);
  } catch (const InvalidInput& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalid;
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
