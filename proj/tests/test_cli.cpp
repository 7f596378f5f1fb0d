// Drives the built CLI binary end to end: exit codes, file outputs,
// manifest replay.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

static std::string g_bin;
static int g_failures = 0;

#define EXPECT(cond, msg)                                              \
  do {                                                                 \
    if (!(cond)) {                                                     \
      std::cerr << "[FAIL] " << __LINE__ << ": " << msg << "\n";       \
      ++g_failures;                                                    \
    }                                                                  \
  } while (0)

static int run(const std::string& args) {
  const std::string cmd = g_bin + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

static std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <decigibbs binary>\n";
    return 2;
  }
  g_bin = argv[1];
  const fs::path work = fs::temp_directory_path() / "decigibbs_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string w = work.string();

  // exit codes
  EXPECT(run("nosuch") == 2, "unknown subcommand exits 2");
  EXPECT(run("") == 2, "missing subcommand exits 2");
  EXPECT(run("--help") == 0, "--help exits 0");
  EXPECT(run("sample --beta 0.5") == 2, "missing required --out exits 2");

  // kernel to stdout: uniform table at beta=0
  {
    const std::string cmd =
        g_bin + " kernel --box 1 --beta 1e-15 --h 0 --bc + > " + w + "/k.csv";
    EXPECT(WEXITSTATUS(std::system(cmd.c_str())) == 0, "kernel stdout run");
    std::ifstream in(work / "k.csv");
    std::string line;
    std::getline(in, line);
    EXPECT(line == "config,probability", "kernel csv header");
    int rows = 0;
    bool uniform = true;
    while (std::getline(in, line)) {
      ++rows;
      const double p = std::stod(line.substr(line.find(',') + 1));
      uniform = uniform && std::abs(p - 1.0 / 512.0) < 1e-9;
    }
    EXPECT(rows == 512, "2^9 rows for a half-width-1 box");
    EXPECT(uniform, "uniform probabilities at beta=0");
  }

  // kernel to a run dir + replay byte-identity
  EXPECT(run("kernel --box 1 --beta 0.7 --h 0.1 --bc + --out " + w + "/k1") == 0,
         "kernel run dir");
  EXPECT(fs::exists(work / "k1" / "manifest.json"), "manifest written");
  EXPECT(run("kernel --box 1 --beta 0.7 --h 0.1 --bc + --out " + w + "/k1") == 1,
         "refuses to overwrite without --force");
  EXPECT(run("replay " + w + "/k1/manifest.json") == 0, "kernel replay identical");
  EXPECT(fs::exists(work / "k1_replay" / "kernel.csv"), "replay outputs");
  EXPECT(slurp(work / "k1" / "kernel.csv") == slurp(work / "k1_replay" / "kernel.csv"),
         "byte-identical kernel csv");

  // sample: config file + flag precedence + env seed
  {
    std::ofstream cfg(work / "run.toml");
    cfg << "beta=0.6\nbox=3\nsweeps=600\nburn_in=100\nthin=2\nseed=5\n";
    cfg.close();
    EXPECT(run("sample --config " + w + "/run.toml --out " + w + "/s1") == 0,
           "sample with config file");
    EXPECT(fs::exists(work / "s1" / "samples.csv"), "samples.csv written");
    EXPECT(fs::exists(work / "s1" / "estimates.csv"), "estimates.csv written");
    const std::string manifest = slurp(work / "s1" / "manifest.json");
    EXPECT(manifest.find("\"seed\": 5") != std::string::npos,
           "config file seed lands in the manifest");

    const std::string env_cmd = "DECIGIBBS_SEED=9 " + g_bin + " sample --config " +
                                w + "/run.toml --out " + w +
                                "/s2 > /dev/null 2>&1";
    EXPECT(WEXITSTATUS(std::system(env_cmd.c_str())) == 0, "env seed run");
    EXPECT(slurp(work / "s2" / "manifest.json").find("\"seed\": 9") !=
               std::string::npos,
           "env overrides the config seed");
    EXPECT(run("replay " + w + "/s1/manifest.json") == 0, "sample replay");
  }

  // decimate round trip through files
  {
    std::ofstream field(work / "field.txt");
    field << "n=2 bc=+\n";
    field << "+++++\n+++++\n++-++\n+++++\n+++++\n";  // minus at (0,0)
    field.close();
    EXPECT(run("decimate --in " + w + "/field.txt --out " + w + "/d1") == 0,
           "decimate run");
    const std::string out = slurp(work / "d1" / "field2.txt");
    EXPECT(out.find("n=1") != std::string::npos, "halved box");
    EXPECT(out.find('-') != std::string::npos, "minus at the origin survives");
  }

  // probe: csv layout and replay
  EXPECT(run("probe-discontinuity --beta 0.7 --pattern alternating --windows 8 "
             "--sweeps 1200 --burn_in 200 --out " +
             w + "/p1") == 0,
         "probe run");
  {
    std::ifstream in(work / "p1" / "gaps.csv");
    std::string header, row;
    std::getline(in, header);
    EXPECT(header == "window,gap,gap_stderr", "gaps header");
    EXPECT(static_cast<bool>(std::getline(in, row)), "one gap row");
    EXPECT(row.rfind("8,", 0) == 0, "window column");
  }
  EXPECT(run("replay " + w + "/p1/manifest.json") == 0, "probe replay");

  // potential: exact mode emits one row per radius
  EXPECT(run("potential --mode exact --site 0,0 --mmax 2 --beta 0.5 --out " + w +
             "/v1") == 0,
         "potential run");
  {
    std::ifstream in(work / "v1" / "psi.csv");
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line)) ++rows;
    EXPECT(rows == 3, "m = 0,1,2 rows");
  }

  // entropy and census smoke runs with tiny budgets
  EXPECT(run("entropy --mode ks --beta 0.4 --block 1 --samples 40 --box 4 "
             "--burn_in 100 --gap 5 --out " +
             w + "/e1") == 0,
         "entropy run");
  EXPECT(run("amoeba-census --beta 0.9 --lambda 0.25 --samples 30 --box 6 "
             "--burn_in 200 --gap 10 --out " +
             w + "/c1") == 0,
         "census run");
  EXPECT(run("replay " + w + "/c1/manifest.json") == 0, "census replay");

  // qcd pipeline smoke run with a tiny budget
  EXPECT(run("qcd --beta 1.2 --fields 1 --mmax 2 --field_burn_in 200 "
             "--field_gap 100 --term_sweeps 800 --term_burn_in 100 --out " +
             w + "/q1") == 0,
         "qcd run");
  EXPECT(fs::exists(work / "q1" / "terms.csv"), "qcd terms csv");
  EXPECT(fs::exists(work / "q1" / "fits.csv"), "qcd fits csv");

  if (g_failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cerr << "test_cli: " << g_failures << " failure(s)\n";
  return 1;
}
