#include "quasispec/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "quasispec/eigensystem.hpp"
#include "quasispec/projector.hpp"
#include "quasispec/report.hpp"
#include "quasispec/spectrum.hpp"

namespace quasispec {
namespace {

namespace fs = std::filesystem;

Potential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open potential file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
  return potential_from_json(j);
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : dir_(cfg.output_dir) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Argument, "cannot write " + path.string());
    std::cout << path.string() << '\n';
    return out;
  }

  void json(const std::string& name, const nlohmann::json& j) { open(name) << dump_json(j); }

 private:
  fs::path dir_;
};

nlohmann::json tolerances(const RunConfig& cfg) {
  const LocalizeOptions defaults;
  return {{"tol_root", cfg.tol_root},
          {"tol_update", defaults.tol_update},
          {"ode_rel_tol", defaults.ode.rel_tol},
          {"grid_nodes", cfg.grid}};
}

nlohmann::json header(const RunConfig& cfg, const Potential* p) {
  return {{"command", cfg.command}, {"metadata", report_metadata(p, tolerances(cfg))}};
}

LocalizeOptions localize_options(const RunConfig& cfg) {
  LocalizeOptions opts;
  opts.tol_root = cfg.tol_root;
  return opts;
}

StripParams strip(const RunConfig& cfg) { return StripParams(cfg.nu, cfg.R, cfg.sigma); }

void run_solve(const RunConfig& cfg, Writer& out) {
  const auto p = load_potential(cfg.potential_path);
  const auto data = localize(p, cfg.N, strip(cfg), localize_options(cfg));
  auto csv = out.open("spectrum.csv");
  write_csv(csv, data);
  auto j = header(cfg, &p);
  j["N"] = cfg.N;
  j["nu"] = cfg.nu;
  out.json("solve.json", j);
}

void run_asymptotics(const RunConfig& cfg, Writer& out) {
  const auto p = load_potential(cfg.potential_path);
  const auto data = localize(p, cfg.N, strip(cfg), localize_options(cfg));
  const auto rem = remainders(data, cfg.sigma);
  const auto efas = efas_report(p, data, 1, cfg.sigma, eigen_grid(p, cfg.grid));
  auto spectrum = out.open("spectrum.csv");
  write_csv(spectrum, data);
  auto efas_csv = out.open("efas.csv");
  write_csv(efas_csv, efas);
  auto j = header(cfg, &p);
  j["N"] = cfg.N;
  j["sigma"] = cfg.sigma;
  j["remainders"] = {{"norm", rem.norm()},
                     {"weighted_sum", rem.weighted_sum},
                     {"last_decade_increment", rem.last_decade_increment()},
                     {"partial_sums", rem.tail_profile}};
  j["eigenfunctions"] = {{"start_index", efas.start_index},
                         {"weighted_sum", efas.weighted_sum},
                         {"last_decade_increment", efas.last_decade_increment()},
                         {"partial_sums", efas.partial_sums}};
  out.json("asymptotics.json", j);
}

void run_basis(const RunConfig& cfg, Writer& out) {
  const auto p = load_potential(cfg.potential_path);
  const auto data = localize(p, cfg.N, strip(cfg), localize_options(cfg));
  const auto grid = eigen_grid(p, cfg.grid);
  const auto sys = eigensystem(p, data, grid);
  auto j = header(cfg, &p);
  j["N"] = cfg.N;
  j["grid_size"] = grid->size();
  j["biorthogonality_defect"] = biorthogonality_defect(sys);
  j["gram_condition"] = gram_condition(p, data, grid);
  int multiple = 0;
  for (const auto& d : data) multiple += d.multiplicity > 1;
  j["indices_in_multiple_clusters"] = multiple;
  out.json("basis.json", j);
}

void run_projector(const RunConfig& cfg, Writer& out) {
  const auto u0 = load_potential(cfg.potential_path);
  const auto d = cfg.direction_path.empty() ? Potential::cosine_series({0.0, 1.0})
                                            : load_potential(cfg.direction_path);
  const auto steps = continuity_experiment(u0, d, cfg.sigma, cfg.N, cfg.halvings, cfg.t0, strip(cfg));
  auto csv = out.open("continuity.csv");
  csv << "t,norm,skipped\n";
  char buf[96];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", s.t, s.norm, s.skipped ? 1 : 0);
    csv << buf;
  }
  auto j = header(cfg, &u0);
  j["n"] = cfg.N;
  j["sigma"] = cfg.sigma;
  j["grid_size"] = operator_grid(u0)->size();
  j["norm"] = "L2->W21, ||g||^2 = ||g||^2_L2 + ||g'||^2_L2";
  j["direction_hash"] = potential_hash(d);
  auto notes = nlohmann::json::array();
  for (const auto& s : steps)
    if (s.skipped) notes.push_back({{"t", s.t}, {"note", s.note}});
  j["skipped"] = notes;
  out.json("projector.json", j);
}

void run_sweep(const RunConfig& cfg, Writer& out) {
  const auto rep = ball_sweep(cfg.R, cfg.sigma, cfg.samples, cfg.N, cfg.seed, localize_options(cfg));
  auto j = header(cfg, nullptr);
  j["radius"] = rep.radius;
  j["sigma"] = rep.sigma;
  j["samples"] = rep.samples;
  j["N"] = rep.N;
  j["seed"] = rep.seed;
  j["norms"] = rep.norms;
  j["last_decade_increments"] = rep.last_decade_increments;
  j["max_norm"] = rep.max_norm;
  j["median_norm"] = rep.median_norm;
  auto hashes = nlohmann::json::array();
  for (const auto& p : ball_sample(cfg.R, cfg.sigma, cfg.samples, cfg.seed)) hashes.push_back(potential_hash(p));
  j["potential_hashes"] = hashes;
  out.json("sweep.json", j);
}

void run_resolvent(const RunConfig& cfg, Writer& out) {
  const auto p = load_potential(cfg.potential_path);
  const cd lambda = cfg.lambda;
  const double margin = spectral_margin(p, lambda);
  const auto steps = resolvent_experiment(p, lambda, cfg.eps0, cfg.halvings);
  auto csv = out.open("resolvent.csv");
  csv << "eps,distance\n";
  char buf[64];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.eps, s.distance);
    csv << buf;
  }
  auto j = header(cfg, &p);
  j["lambda"] = {lambda.real(), lambda.imag()};
  j["spectral_margin"] = margin;
  j["norm"] = "L2->L2";
  out.json("resolvent.json", j);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Argument:
      return kExitParse;
    case ErrorKind::ContourConflict:
    case ErrorKind::ContourTooClose:
      return kExitConflict;
    default:
      return kExitNumerical;
  }
}

void report_error(const RunConfig& cfg, const nlohmann::json& payload) {
  const auto text = dump_json(payload);
  std::cerr << text;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  std::ofstream(fs::path(cfg.output_dir) / "error.json", std::ios::binary) << text;
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> commands = {"solve", "asymptotics", "basis",
                                                    "projector", "sweep", "resolvent"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    throw Error(ErrorKind::Parse, "unknown command '" + command + "'");
  if (command != "sweep" && potential_path.empty())
    throw Error(ErrorKind::Parse, command + " requires --potential");
  if (N < 1) throw Error(ErrorKind::Parse, "--n must be positive");
  if (!(tol_root > 0.0)) throw Error(ErrorKind::Parse, "--tol-root must be positive");
  if (grid < 16) throw Error(ErrorKind::Parse, "--grid must be at least 16");
  if (!(nu >= 0.0) || !(R >= 0.0) || !(sigma >= 0.0))
    throw Error(ErrorKind::Parse, "--nu, --radius and --sigma must be non-negative");
  if (samples < 1) throw Error(ErrorKind::Parse, "--samples must be positive");
  if (halvings < 0) throw Error(ErrorKind::Parse, "--halvings must be non-negative");
  if (!(t0 > 0.0) || !(eps0 > 0.0)) throw Error(ErrorKind::Parse, "--t0 and --eps0 must be positive");
}

int run(const RunConfig& cfg) {
  try {
    cfg.validate();
    Writer out(cfg);
    if (cfg.command == "solve") run_solve(cfg, out);
    else if (cfg.command == "asymptotics") run_asymptotics(cfg, out);
    else if (cfg.command == "basis") run_basis(cfg, out);
    else if (cfg.command == "projector") run_projector(cfg, out);
    else if (cfg.command == "sweep") run_sweep(cfg, out);
    else run_resolvent(cfg, out);
    return 0;
  } catch (const Error& e) {
    report_error(cfg, error_json(e));
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(cfg, {{"error", {{"kind", "Internal"}, {"message", e.what()}}}});
    return kExitNumerical;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Spectra of Sturm-Liouville operators with distributional potentials"};
  RunConfig cfg;
  app.add_option("--command", cfg.command, "solve | asymptotics | basis | projector | sweep | resolvent")
      ->required();
  app.add_option("--potential", cfg.potential_path, "potential JSON file");
  app.add_option("--direction", cfg.direction_path, "projector: perturbation direction JSON");
  app.add_option("--n", cfg.N, "number of indices")->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "smoothness index")->capture_default_str();
  app.add_option("--radius", cfg.R, "ball radius")->capture_default_str();
  app.add_option("--nu", cfg.nu, "strip half-width")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
  app.add_option("--tol-root", cfg.tol_root, "root residual tolerance")->capture_default_str();
  app.add_option("--grid", cfg.grid, "eigenfunction grid nodes")->capture_default_str();
  app.add_option("--samples", cfg.samples, "sweep: number of potentials")->capture_default_str();
  app.add_option("--halvings", cfg.halvings, "projector/resolvent: halvings")->capture_default_str();
  app.add_option("--t0", cfg.t0, "projector: first step")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "resolvent: spectral parameter")->capture_default_str();
  app.add_option("--eps0", cfg.eps0, "resolvent: first mollification width")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }
  return run(cfg);
}

}  // namespace quasispec
