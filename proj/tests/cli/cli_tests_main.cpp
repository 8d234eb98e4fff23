// End-to-end checks of the ccf-sim binary: exit codes, output files, and
// byte-level determinism. argv[1] is the path to the binary under test.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define CHECK(cond)                                                              \
    do {                                                                         \
        if (!(cond)) {                                                           \
            ++g_failures;                                                        \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << ": " << #cond \
                      << "\n";                                                   \
        }                                                                        \
    } while (0)

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

fs::path g_scratch;

RunResult run(const std::string& binary, const std::string& args) {
    const fs::path out_file = g_scratch / "stdout.txt";
    const fs::path err_file = g_scratch / "stderr.txt";
    const std::string cmd =
        binary + " " + args + " > " + out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (status == -1)
        r.exit_code = -1;
    else
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Small but complete run config: one rho point, few histories, loud failure
// rates so every campaign finishes in well under a second.
const char* kSimulateConfig =
    "[model]\n"
    "lambda_ind = 1.0e-4\n"
    "rho = 0.2\n"
    "[run]\n"
    "histories = 40\n"
    "master_seed = 7\n"
    "jobs = 1\n"
    "[sweep]\n"
    "rho_values = [0.2]\n";

const char* kSweepConfig =
    "[model]\n"
    "lambda_ind = 1.0e-4\n"
    "[run]\n"
    "histories = 30\n"
    "master_seed = 11\n"
    "jobs = 1\n"
    "[sweep]\n"
    "orientation_pairs = [[0.25, 0.75], [0.75, 0.25]]\n";

void test_params(const std::string& bin) {
    const fs::path cfg = g_scratch / "default.toml";
    write_file(cfg, "");
    const RunResult r = run(bin, "params --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "elements: 40 (4 divisions x 5 APUs, vote 1oo2, GAPU 3oo4)"));
    CHECK(contains(r.out, "mu: 9.56550e-07"));
    CHECK(contains(r.out, "omega: 1.18093e-08"));
    CHECK(contains(r.out, "k=40:"));

    // Variant override changes the solved rates.
    const RunResult rb = run(bin, "params --config " + cfg.string() + " --variant binomial");
    CHECK(rb.exit_code == 0);
    CHECK(contains(rb.out, "mu: 1.04130e-06"));
}

void test_simulate_outputs(const std::string& bin) {
    const fs::path cfg = g_scratch / "simulate.toml";
    write_file(cfg, kSimulateConfig);
    const fs::path out_dir = g_scratch / "sim_out";
    const fs::path rex = g_scratch / "events.jsonl";
    const RunResult r = run(bin, "simulate --config " + cfg.string() + " --out " +
                                     out_dir.string() + " --rex " + rex.string());
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "probability of failure on demand"));
    CHECK(contains(r.out, "wrote " + (out_dir / "simulate.csv").string()));
    CHECK(fs::exists(out_dir / "simulate.csv"));
    CHECK(fs::exists(out_dir / "simulate_summary.txt"));
    CHECK(fs::exists(rex));

    const std::string csv = slurp(out_dir / "simulate.csv");
    CHECK(contains(csv, "label,rho,mu,omega,histories,pfd_ref"));
    CHECK(contains(csv, "rho=0.2000,2.00000e-01,"));

    const std::string rex_text = slurp(rex);
    CHECK(!rex_text.empty());
    CHECK(rex_text.front() == '{');
    CHECK(contains(rex_text, "\"event\":"));
}

void test_determinism(const std::string& bin) {
    const fs::path cfg = g_scratch / "simulate.toml";
    write_file(cfg, kSimulateConfig);
    const fs::path a = g_scratch / "det_a";
    const fs::path b = g_scratch / "det_b";
    CHECK(run(bin, "simulate --config " + cfg.string() + " --out " + a.string()).exit_code == 0);
    CHECK(run(bin, "simulate --config " + cfg.string() + " --out " + b.string()).exit_code == 0);
    CHECK(slurp(a / "simulate.csv") == slurp(b / "simulate.csv"));
    CHECK(slurp(a / "simulate_summary.txt") == slurp(b / "simulate_summary.txt"));

    // The worker count must not leak into the results.
    const fs::path c = g_scratch / "det_c";
    CHECK(run(bin, "simulate --config " + cfg.string() + " --out " + c.string() + " --jobs 3")
              .exit_code == 0);
    CHECK(slurp(a / "simulate.csv") == slurp(c / "simulate.csv"));

    // A different seed must change the estimate.
    const fs::path d = g_scratch / "det_d";
    CHECK(run(bin, "simulate --config " + cfg.string() + " --out " + d.string() + " --seed 99")
              .exit_code == 0);
    CHECK(slurp(a / "simulate.csv") != slurp(d / "simulate.csv"));
}

void test_orientation_sweep(const std::string& bin) {
    const fs::path cfg = g_scratch / "sweep.toml";
    write_file(cfg, kSweepConfig);
    const fs::path out_dir = g_scratch / "sweep_out";
    const RunResult r =
        run(bin, "orientation-sweep --config " + cfg.string() + " --out " + out_dir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out_dir / "orientation.csv"));
    CHECK(fs::exists(out_dir / "orientation_summary.txt"));
    const std::string csv = slurp(out_dir / "orientation.csv");
    CHECK(contains(csv, "label,p_a,p_b,failing,surviving,mttf_hours"));
    CHECK(contains(csv, "uniform,1.0000,0.0000,"));
    CHECK(contains(csv, "pa=0.2500_pb=0.7500,"));
    CHECK(contains(csv, "pa=0.7500_pb=0.2500,"));
    // Three rows: baseline plus two pairs.
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 4);
}

void test_error_paths(const std::string& bin) {
    // Unknown config key.
    const fs::path bad_key = g_scratch / "bad_key.toml";
    write_file(bad_key, "[model]\nlambda = 1.0\n");
    const RunResult r1 = run(bin, "params --config " + bad_key.string());
    CHECK(r1.exit_code == 1);
    CHECK(contains(r1.err, "unknown key 'model.lambda'"));

    // Config file that does not exist fails CLI validation.
    const RunResult r2 = run(bin, "params --config " + (g_scratch / "missing.toml").string());
    CHECK(r2.exit_code == 1);

    // Malformed TOML carries file and line.
    const fs::path bad_syntax = g_scratch / "bad_syntax.toml";
    write_file(bad_syntax, "[model]\nrho 0.2\n");
    const RunResult r3 = run(bin, "params --config " + bad_syntax.string());
    CHECK(r3.exit_code == 1);
    CHECK(contains(r3.err, "bad_syntax.toml:2"));

    // Bad override token.
    const fs::path cfg = g_scratch / "default.toml";
    write_file(cfg, "");
    const RunResult r4 = run(bin, "params --config " + cfg.string() + " --variant bogus");
    CHECK(r4.exit_code == 1);
    CHECK(contains(r4.err, "--variant"));

    // No subcommand.
    const RunResult r5 = run(bin, "");
    CHECK(r5.exit_code == 1);

    // Infeasible orientation: all shock victims into one element.
    const fs::path infeasible = g_scratch / "infeasible.toml";
    write_file(infeasible,
               "[model]\nrho = 0.5\n[model.orientation]\nenabled = true\nsubset = [0]\n"
               "p_a = 1.0\n[run]\nhistories = 5\n[sweep]\nrho_values = [0.5]\n");
    const RunResult r6 = run(bin, "simulate --config " + infeasible.string() + " --out " +
                                      (g_scratch / "x").string());
    CHECK(r6.exit_code == 1);
    CHECK(contains(r6.err, "orientation"));

    // Out-of-range model value.
    const fs::path bad_value = g_scratch / "bad_value.toml";
    write_file(bad_value, "[model]\nrho = 1.5\n");
    const RunResult r7 = run(bin, "params --config " + bad_value.string());
    CHECK(r7.exit_code == 1);
    CHECK(contains(r7.err, "model.rho"));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-ccf-sim>\n";
        return 2;
    }
    const std::string bin = argv[1];
    g_scratch = fs::temp_directory_path() / "ccfsim_cli_tests";
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);

    test_params(bin);
    test_simulate_outputs(bin);
    test_determinism(bin);
    test_orientation_sweep(bin);
    test_error_paths(bin);

    if (g_failures == 0) {
        std::cout << "cli tests: all passed\n";
        fs::remove_all(g_scratch);
        return 0;
    }
    std::cout << "cli tests: " << g_failures << " failure(s), scratch kept at " << g_scratch
              << "\n";
    return 1;
}
