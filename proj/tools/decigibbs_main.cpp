// Command-line driver: exact kernels, sampling, decimation probes, potential
// evaluation, amoeba census, entropy estimators, and manifest replay.

#include <omp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decigibbs/analysis.hpp"
#include "decigibbs/manifest.hpp"

namespace fs = std::filesystem;
using namespace decigibbs;

#ifndef DECIGIBBS_VERSION
#define DECIGIBBS_VERSION "0.1.0"
#endif

namespace {

using Params = std::map<std::string, std::string>;

double get_d(const Params& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : std::stod(it->second);
}
long get_l(const Params& p, const std::string& key, long dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : std::stol(it->second);
}
std::string get_s(const Params& p, const std::string& key,
                  const std::string& dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

BoundaryKind bc_from_string(const std::string& s) {
  if (s == "+") return BoundaryKind::Plus;
  if (s == "-") return BoundaryKind::Minus;
  if (s == "free") return BoundaryKind::Free;
  throw CLI::ValidationError("--bc must be +, - or free");
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

Site parse_site(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("site must be x,y");
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

std::function<Spin(const Site&)> pattern_from_string(const std::string& s) {
  if (s == "alternating") return image_alternating();
  if (s == "all-plus") return image_all_plus();
  return image_from_field(read_field_file(s));
}

// key=value lines; '#' starts a comment. Existing entries (command-line
// flags, env) win over file values.
void merge_config_file(const std::string& path, Params& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty() && !params.count(key)) params[key] = value;
  }
}

std::ofstream open_csv(const fs::path& dir, const std::string& name,
                       std::vector<std::string>& outputs) {
  outputs.push_back(name);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

// ---------------------------------------------------------------------------
// subcommand cores; a Params map in, output files out (replayable)

std::vector<std::string> run_kernel(const Params& p, const fs::path& dir,
                                    std::ostream* stdout_sink) {
  const IsingParams params{get_d(p, "beta", 1.0), get_d(p, "h", 0.0)};
  const int n = static_cast<int>(get_l(p, "box", 1));
  const BoundaryKind bc = bc_from_string(get_s(p, "bc", "+"));
  const KernelTable t = kernel_exact(Volume::box(n), BoundaryMap{bc, {}}, params);

  std::vector<std::string> outputs;
  std::ofstream file;
  std::ostream* out = stdout_sink;
  if (!out) {
    file = open_csv(dir, "kernel.csv", outputs);
    out = &file;
  }
  *out << "config,probability\n";
  for (std::size_t c = 0; c < t.probs.size(); ++c)
    *out << c << "," << format_double(t.probs[c]) << "\n";
  return outputs;
}

std::vector<std::string> run_sample(const Params& p, const fs::path& dir) {
  ChainConfig cfg;
  cfg.params = IsingParams{get_d(p, "beta", 1.0), get_d(p, "h", 0.0)};
  cfg.box_half_width = static_cast<int>(get_l(p, "box", 8));
  cfg.bc = bc_from_string(get_s(p, "bc", "+"));
  cfg.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  cfg.sweeps = get_l(p, "sweeps", 20000);
  cfg.burn_in = get_l(p, "burn_in", 2000);
  cfg.thin = get_l(p, "thin", 2);
  const std::string algorithm = get_s(p, "algorithm", "heatbath");

  std::vector<Observable> obs;
  std::stringstream ss(get_s(p, "observables", "magnetization;sigma:0,0"));
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok.empty()) continue;
    if (tok == "magnetization") obs.push_back(obs_magnetization());
    else if (tok.rfind("sigma:", 0) == 0)
      obs.push_back(obs_spin_at(parse_site(tok.substr(6))));
    else throw CLI::ValidationError("unknown observable: " + tok);
  }
  if (obs.empty()) obs.push_back(obs_magnetization());

  std::vector<std::string> outputs;
  std::ofstream csv = open_csv(dir, "samples.csv", outputs);
  csv << "epoch,observable,value\n";
  long epoch_counter = 0;
  if (algorithm == "heatbath") {
    run_chain_callback(cfg, [&](const SpinGrid& g, long epoch) {
      for (const Observable& o : obs)
        csv << epoch << "," << o.name << "," << format_double(o.eval(g)) << "\n";
      epoch_counter = epoch;
    });
  } else if (algorithm == "wolff") {
    const auto est = run_wolff(cfg, obs);
    for (const auto& [name, e] : est)
      csv << 0 << "," << name << "," << format_double(e.mean) << "\n";
  } else {
    throw CLI::ValidationError("algorithm must be heatbath or wolff");
  }

  std::ofstream est_csv = open_csv(dir, "estimates.csv", outputs);
  est_csv << "observable,mean,stderr,n_samples,seed\n";
  if (algorithm == "heatbath") {
    const auto est = run_chain(cfg, obs);
    for (const auto& [name, e] : est)
      est_csv << name << "," << format_double(e.mean) << ","
              << format_double(e.stderr_) << "," << e.n_samples << "," << e.seed
              << "\n";
  }
  (void)epoch_counter;
  return outputs;
}

std::vector<std::string> run_decimate(const Params& p, const fs::path& dir) {
  const SpinField in = read_field_file(get_s(p, "in", ""));
  const SpinField out = decimate(in);
  std::vector<std::string> outputs;
  outputs.push_back("field2.txt");
  write_field_file((dir / "field2.txt").string(), out);
  return outputs;
}

std::vector<std::string> run_probe(const Params& p, const fs::path& dir) {
  const double beta = get_d(p, "beta", 1.0);
  const std::string pattern_name = get_s(p, "pattern", "alternating");
  const std::vector<int> windows = parse_int_list(get_s(p, "windows", "16,32,48"));
  McBudget mc;
  mc.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  mc.sweeps = get_l(p, "sweeps", 24000);
  mc.burn_in = get_l(p, "burn_in", 4000);
  mc.thin = get_l(p, "thin", 2);

  const ProbeResult res = probe_discontinuity(
      beta, pattern_from_string(pattern_name), pattern_name, windows, mc);

  std::vector<std::string> outputs;
  std::ofstream csv = open_csv(dir, "probe.csv", outputs);
  csv << "window,bc,p_plus_spin,stderr\n";
  for (const ProbeRow& r : res.rows) {
    csv << r.window << ",+," << format_double(r.p_plus) << ","
        << format_double(r.se_plus) << "\n";
    csv << r.window << ",-," << format_double(r.p_minus) << ","
        << format_double(r.se_minus) << "\n";
  }
  std::ofstream gaps = open_csv(dir, "gaps.csv", outputs);
  gaps << "window,gap,gap_stderr\n";
  for (const ProbeRow& r : res.rows)
    gaps << r.window << "," << format_double(r.gap()) << ","
         << format_double(r.gap_se()) << "\n";
  return outputs;
}

std::vector<std::string> run_potential(const Params& p, const fs::path& dir) {
  const std::string mode = get_s(p, "mode", "exact");
  const Site site = parse_site(get_s(p, "site", "0,0"));
  const int mmax = static_cast<int>(get_l(p, "mmax", 3));
  const double beta = get_d(p, "beta", 1.0);
  const IsingParams params{beta, 0.0};
  const std::string field_path = get_s(p, "field", "");

  std::function<Spin(const Site&)> omega = image_all_plus();
  if (!field_path.empty()) omega = image_from_field(read_field_file(field_path));

  std::vector<std::string> outputs;
  std::ofstream csv = open_csv(dir, "psi.csv", outputs);
  csv << "i_x,i_y,m,value,stderr\n";
  if (mode == "exact") {
    IsingExactSource source(params);
    for (int m = 0; m <= mmax; ++m) {
      const Measured t = telescoped_term(site, m, omega, source);
      csv << site.x << "," << site.y << "," << m << ","
          << format_double(t.value) << "," << format_double(t.stderr_) << "\n";
    }
  } else if (mode == "mc") {
    const int window = static_cast<int>(get_l(p, "window", 2 * (mmax + 4)));
    McBudget mc;
    mc.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
    mc.sweeps = get_l(p, "sweeps", 20000);
    mc.burn_in = get_l(p, "burn_in", 2000);
    mc.thin = get_l(p, "thin", 2);
    for (int m = 1; m <= mmax; ++m) {
      McBudget local = mc;
      local.seed = CounterRng::derive(mc.seed, m);
      const Measured t = telescoped_term_mc(site, m, omega, params,
                                            BoundaryKind::Plus, window, local);
      csv << site.x << "," << site.y << "," << m << ","
          << format_double(t.value) << "," << format_double(t.stderr_) << "\n";
    }
  } else {
    throw CLI::ValidationError("mode must be exact or mc");
  }
  // non-nullness diagnostic for the uniform potential bound
  std::ofstream diag = open_csv(dir, "nonnullness.csv", outputs);
  diag << "beta,m_i\n"
       << format_double(beta) << ","
       << format_double(single_site_nonnullness(params)) << "\n";
  return outputs;
}

std::vector<std::string> run_census(const Params& p, const fs::path& dir) {
  const double beta = get_d(p, "beta", 1.0);
  const double lambda = get_d(p, "lambda", 0.25);
  const int n_samples = static_cast<int>(get_l(p, "samples", 200));
  const int box = static_cast<int>(get_l(p, "box", 12));

  ChainConfig cfg;
  cfg.params = IsingParams{beta, 0.0};
  cfg.box_half_width = box;
  cfg.bc = BoundaryKind::Plus;
  cfg.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  cfg.burn_in = get_l(p, "burn_in", 1000);
  cfg.thin = get_l(p, "gap", 50);
  cfg.sweeps = cfg.burn_in + cfg.thin * n_samples;

  std::vector<SpinField> samples;
  run_chain_callback(cfg, [&](const SpinGrid& g, long) {
    if (static_cast<int>(samples.size()) < n_samples)
      samples.push_back(g.to_field(BoundaryKind::Plus, {}));
  });
  const CensusResult res =
      amoeba_census(samples, std::nullopt, lambda, {0, 4, 8, 16, 32});

  std::vector<std::string> outputs;
  std::ofstream csv = open_csv(dir, "census.csv", outputs);
  csv << "diam_lo,diam_hi,compatible,benign,benign_fraction\n";
  for (const CensusBin& b : res.bins) {
    const double frac =
        b.compatible ? static_cast<double>(b.benign) / b.compatible : 0.0;
    csv << b.diam_lo << "," << b.diam_hi << "," << b.compatible << ","
        << b.benign << "," << format_double(frac) << "\n";
  }
  return outputs;
}

std::vector<std::string> run_qcd(const Params& p, const fs::path& dir) {
  const double beta = get_d(p, "beta", 1.2);
  const int n_fields = static_cast<int>(get_l(p, "fields", 5));
  const int mmax = static_cast<int>(get_l(p, "mmax", 8));
  const double lambda = get_d(p, "lambda", 0.25);

  QcdBudget budget;
  budget.field_mc.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  budget.field_mc.burn_in = get_l(p, "field_burn_in", 3000);
  budget.field_gap = get_l(p, "field_gap", 1500);
  budget.term_mc.seed = budget.field_mc.seed;
  budget.term_mc.sweeps = get_l(p, "term_sweeps", 12000);
  budget.term_mc.burn_in = get_l(p, "term_burn_in", 1500);
  budget.term_mc.thin = get_l(p, "term_thin", 2);

  const QcdReport report = qcd_pipeline(beta, n_fields, mmax, lambda, budget);

  std::vector<std::string> outputs;
  std::ofstream terms = open_csv(dir, "terms.csv", outputs);
  terms << "field,anchor_x,anchor_y,m,abs_psi,stderr\n";
  std::ofstream fits = open_csv(dir, "fits.csv", outputs);
  fits << "field,minus_sites,l_i,l_infinite,c1,c2,lambda,lambda_se,accepted,"
          "refusal\n";
  for (const QcdFieldReport& f : report.fields) {
    for (const QcdPoint& t : f.terms)
      terms << f.field_index << "," << f.anchor->x << "," << f.anchor->y << ","
            << t.m << "," << format_double(t.abs_psi) << ","
            << format_double(t.stderr_) << "\n";
    fits << f.field_index << "," << f.minus_sites << "," << f.quenched_length
         << "," << (f.quenched_infinite ? 1 : 0) << ",";
    if (f.fit)
      fits << format_double(f.fit->c1) << "," << format_double(f.fit->c2) << ","
           << format_double(f.fit->lambda) << ","
           << format_double(f.fit->lambda_se) << "," << (f.fit->accepted ? 1 : 0)
           << ",";
    else
      fits << ",,,,0,";
    fits << "\"" << f.refusal << "\"\n";
  }
  return outputs;
}

std::vector<std::string> run_entropy(const Params& p, const fs::path& dir) {
  const double beta = get_d(p, "beta", 1.0);
  const int block = static_cast<int>(get_l(p, "block", 1));
  const int n_samples = static_cast<int>(get_l(p, "samples", 400));
  const int box = static_cast<int>(get_l(p, "box", 8));
  const std::string mode = get_s(p, "mode", "ks");

  auto collect = [&](BoundaryKind bc, std::uint64_t seed) {
    ChainConfig cfg;
    cfg.params = IsingParams{beta, 0.0};
    cfg.box_half_width = box;
    cfg.bc = bc;
    cfg.seed = seed;
    cfg.burn_in = get_l(p, "burn_in", 1000);
    cfg.thin = get_l(p, "gap", 20);
    cfg.sweeps = cfg.burn_in + cfg.thin * n_samples;
    std::vector<SpinField> fields;
    run_chain_callback(cfg, [&](const SpinGrid& g, long) {
      if (static_cast<int>(fields.size()) < n_samples)
        fields.push_back(g.to_field(bc, {}));
    });
    return fields;
  };

  const std::uint64_t seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  std::vector<std::string> outputs;
  std::ofstream csv = open_csv(dir, "entropy.csv", outputs);
  if (mode == "ks") {
    const auto fields = collect(bc_from_string(get_s(p, "bc", "+")), seed);
    const EntropyEstimate e = ks_entropy(fields, block);
    csv << "mode,block,value,n_blocks\nks," << e.block << ","
        << format_double(e.value) << "," << e.n_blocks << "\n";
  } else if (mode == "rel") {
    // mu from the minus phase, nu from the plus phase
    const auto mu = collect(BoundaryKind::Minus, CounterRng::derive(seed, 1));
    const auto nu = collect(BoundaryKind::Plus, CounterRng::derive(seed, 2));
    const EntropyEstimate e = relative_entropy_density(mu, nu, block);
    csv << "mode,block,value,n_blocks\nrel," << e.block << ","
        << format_double(e.value) << "," << e.n_blocks << "\n";
  } else {
    throw CLI::ValidationError("mode must be ks or rel");
  }
  return outputs;
}

std::vector<std::string> dispatch_command(const std::string& command,
                                          const Params& p, const fs::path& dir) {
  if (command == "kernel") return run_kernel(p, dir, nullptr);
  if (command == "sample") return run_sample(p, dir);
  if (command == "decimate") return run_decimate(p, dir);
  if (command == "probe-discontinuity") return run_probe(p, dir);
  if (command == "potential") return run_potential(p, dir);
  if (command == "amoeba-census") return run_census(p, dir);
  if (command == "qcd") return run_qcd(p, dir);
  if (command == "entropy") return run_entropy(p, dir);
  throw std::runtime_error("manifest names unknown command: " + command);
}

void finish_run(const std::string& command, Params p, const fs::path& dir,
                const std::vector<std::string>& outputs, double wall_seconds) {
  RunManifest m;
  m.command = command;
  m.seed = static_cast<std::uint64_t>(get_l(p, "seed", 1));
  p.erase("out");
  p.erase("force");
  m.params = std::move(p);
  m.outputs = outputs;
  m.wall_seconds = wall_seconds;
  m.threads = omp_get_max_threads();
  m.version = DECIGIBBS_VERSION;
  write_manifest(dir, m);
}

int execute(const std::string& command, const Params& params,
            const std::string& out_dir, bool force) {
  const fs::path dir = out_dir;
  prepare_run_dir(dir, force);
  const auto t0 = std::chrono::steady_clock::now();
  const auto outputs = dispatch_command(command, params, dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  finish_run(command, params, dir, outputs, secs);
  std::cout << command << ": wrote " << outputs.size() << " file(s) to " << dir
            << "\n";
  return 0;
}

int run_replay(const std::string& manifest_path, std::string out_dir,
               bool force) {
  const fs::path src = manifest_path;
  const RunManifest m = read_manifest(src);
  const fs::path orig_dir = src.parent_path();
  if (out_dir.empty()) out_dir = (orig_dir.string() + "_replay");
  prepare_run_dir(out_dir, force);
  dispatch_command(m.command, m.params, out_dir);

  bool all_ok = true;
  for (const std::string& name : m.outputs) {
    const bool ok = files_identical(orig_dir / name, fs::path(out_dir) / name);
    std::cout << name << ": " << (ok ? "identical" : "DIFFERS") << "\n";
    all_ok = all_ok && ok;
  }
  std::cout << (all_ok ? "replay reproduced all outputs byte-identically"
                       : "replay FAILED to reproduce outputs")
            << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decimation of the 2d Ising model: kernels, samplers, probes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DECIGIBBS_VERSION);
  app.set_help_flag("--help", "print help");  // frees -h for the field flag

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0 = default)");

  // Flags shared by run-producing subcommands.
  struct Common {
    std::string out;
    bool force = false;
    long seed = 1;
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
  };

  std::map<std::string, Params> all_params;
  std::map<std::string, Common> commons;

  auto add_run_command = [&](const std::string& name, const std::string& desc,
                             const std::vector<std::pair<std::string, std::string>>&
                                 options) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help");
    sub->fallthrough();  // --threads may follow the subcommand
    Common& common = commons[name];
    Params& params = all_params[name];
    auto* out_opt = sub->add_option("--out", common.out, "output directory");
    if (name != "kernel") out_opt->required();  // kernel may print to stdout
    sub->add_flag("--force", common.force, "overwrite a non-empty directory");
    common.seed_opt = sub->add_option("--seed", common.seed, "RNG seed")
                          ->envname("DECIGIBBS_SEED");
    for (const auto& [key, help] : options) {
      params[key];  // create slot
      sub->add_option_function<std::string>(
             "--" + key,
             [&params, key = key](const std::string& v) { params[key] = v; },
             help)
          ->default_str(params[key]);
    }
    return sub;
  };

  add_run_command("kernel", "exact finite-volume kernel table",
                  {{"box", "box half-width"},
                   {"beta", "inverse temperature"},
                   {"h", "magnetic field"},
                   {"bc", "boundary: +, - or free"}});
  CLI::App* sample_cmd = add_run_command(
      "sample", "Monte Carlo sampling run",
      {{"beta", "inverse temperature"},
       {"h", "magnetic field"},
       {"box", "box half-width"},
       {"bc", "boundary"},
       {"sweeps", "total sweeps"},
       {"burn_in", "discarded sweeps"},
       {"thin", "sweeps between samples"},
       {"algorithm", "heatbath or wolff"},
       {"observables", "semicolon list: magnetization, sigma:x,y"}});
  sample_cmd->add_option("--config", commons["sample"].config_path,
                         "key=value config file (flags take precedence)");
  add_run_command("decimate", "restrict a field to the even sublattice",
                  {{"in", "input field file"}});
  add_run_command("probe-discontinuity",
                  "decimated-kernel gap across nested windows",
                  {{"beta", "inverse temperature"},
                   {"pattern", "alternating, all-plus or a field file"},
                   {"windows", "comma list of window sizes"},
                   {"sweeps", "sweeps per leg"},
                   {"burn_in", "discarded sweeps"},
                   {"thin", "sweeps between samples"}});
  add_run_command("potential", "telescoped potential terms",
                  {{"mode", "exact or mc"},
                   {"site", "anchor site x,y"},
                   {"mmax", "largest telescope radius"},
                   {"beta", "inverse temperature"},
                   {"field", "configuration file (default all plus)"},
                   {"window", "window half-width for mc mode"},
                   {"sweeps", "sweeps per summand"},
                   {"burn_in", "discarded sweeps"},
                   {"thin", "sweeps between samples"}});
  add_run_command("amoeba-census", "benign fraction of sampled amoebas",
                  {{"beta", "inverse temperature"},
                   {"lambda", "density threshold"},
                   {"samples", "number of sampled configurations"},
                   {"box", "box half-width"},
                   {"burn_in", "discarded sweeps"},
                   {"gap", "sweeps between samples"}});
  add_run_command("qcd", "quenched correlation decay pipeline",
                  {{"beta", "inverse temperature"},
                   {"fields", "number of sampled fields"},
                   {"mmax", "largest telescope radius"},
                   {"lambda", "density threshold"},
                   {"field_burn_in", "proxy chain burn-in"},
                   {"field_gap", "sweeps between fields"},
                   {"term_sweeps", "sweeps per summand"},
                   {"term_burn_in", "summand burn-in"},
                   {"term_thin", "sweeps between samples"}});
  add_run_command("entropy", "block entropy estimators",
                  {{"mode", "ks or rel"},
                   {"beta", "inverse temperature"},
                   {"bc", "boundary for ks mode"},
                   {"block", "block side k"},
                   {"samples", "number of sampled configurations"},
                   {"box", "box half-width"},
                   {"burn_in", "discarded sweeps"},
                   {"gap", "sweeps between samples"}});

  CLI::App* replay = app.add_subcommand("replay", "re-run from a manifest");
  replay->fallthrough();
  std::string manifest_path, replay_out;
  bool replay_force = false;
  replay->add_option("manifest", manifest_path, "manifest.json path")
      ->required();
  replay->add_option("--out", replay_out, "output directory");
  replay->add_flag("--force", replay_force, "overwrite a non-empty directory");

  // stdout mode for kernel when no --out was given would complicate replay;
  // a run directory is always required instead.

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (replay->parsed())
      return run_replay(manifest_path, replay_out, replay_force);
    for (auto& [name, common] : commons) {
      CLI::App* sub = app.get_subcommand(name);
      if (!sub->parsed()) continue;
      Params params;
      for (const auto& [key, value] : all_params[name])
        if (!value.empty()) params[key] = value;
      if (common.seed_opt->count() > 0) params["seed"] = std::to_string(common.seed);
      if (!common.config_path.empty()) merge_config_file(common.config_path, params);
      if (!params.count("seed")) params["seed"] = std::to_string(common.seed);
      if (name == "kernel" && common.out.empty()) {
        run_kernel(params, {}, &std::cout);
        return 0;
      }
      return execute(name, params, common.out, common.force);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "no subcommand\n";
  return 2;
}
