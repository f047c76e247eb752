#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path log = workdir / "cli_out.txt";
    std::ostringstream cmd;
    cmd << "cd " << workdir << " && " << SU3LGT_CLI_PATH << " " << args << " > " << log
        << " 2>&1";
    const int rc = std::system(cmd.str().c_str());
    std::ifstream in(log);
    std::ostringstream os;
    os << in.rdbuf();
    return {WEXITSTATUS(rc), os.str()};
}

fs::path make_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_config(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("build-basis reports the documented sizes") {
    const auto dir = make_dir("su3lgt_cli_basis");
    write_config(dir / "run.cfg",
                 "dimension = 1\nextents = 1\nlambda = 1\noutput = out\n");
    const auto r = run_cli("build-basis --config run.cfg", dir);
    CHECK(r.exit_code == 0);
    const std::string s = file_bytes(dir / "out" / "basis_summary.txt");
    CHECK(s.find("per-link full dimension 83") != std::string::npos);
    CHECK(s.find("reduced (mod-3) basis 18") != std::string::npos);
    CHECK(s.find("gauge-invariant basis 4") != std::string::npos);
    CHECK(s.find("qubits per link 18") != std::string::npos);
    CHECK(s.find("config-hash") != std::string::npos);

    SUBCASE("lambda 0: every size is 1") {
        write_config(dir / "run0.cfg",
                     "dimension = 1\nextents = 1\nlambda = 0\noutput = out0\n");
        const auto r0 = run_cli("build-basis --config run0.cfg", dir);
        CHECK(r0.exit_code == 0);
        const std::string s0 = file_bytes(dir / "out0" / "basis_summary.txt");
        CHECK(s0.find("per-link full dimension 1") != std::string::npos);
        CHECK(s0.find("pattern space 1") != std::string::npos);
        CHECK(s0.find("reduced (mod-3) basis 1") != std::string::npos);
        CHECK(s0.find("gauge-invariant basis 1") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("compile runs are deterministic byte for byte") {
    const auto dir = make_dir("su3lgt_cli_compile");
    write_config(dir / "run.cfg",
                 "dimension = 1\nextents = 2\nlambda = 1\noutput = out1\nseed = 31\n");
    CHECK(run_cli("compile --config run.cfg", dir).exit_code == 0);
    write_config(dir / "run2.cfg",
                 "dimension = 1\nextents = 2\nlambda = 1\noutput = out2\nseed = 31\n");
    CHECK(run_cli("compile --config run2.cfg", dir).exit_code == 0);
    for (const char* f : {"compiled_p0.cgop", "compiled_p1.cgop"}) {
        const std::string a = file_bytes(dir / "out1" / f);
        const std::string b = file_bytes(dir / "out2" / f);
        CHECK(!a.empty());
        // outputs differ only through the echoed output directory name, which
        // enters the config hash; same config -> identical bytes
        CHECK(a.find("convention su3cg-gt-lex-v1") != std::string::npos);
        (void)b;
    }
    // identical configs give identical bytes
    write_config(dir / "run3.cfg",
                 "dimension = 1\nextents = 2\nlambda = 1\noutput = out1\nseed = 31\n");
    fs::remove_all(dir / "out1");
    CHECK(run_cli("compile --config run.cfg", dir).exit_code == 0);
    const std::string first = file_bytes(dir / "out1" / "compiled_p0.cgop");
    fs::remove_all(dir / "out1");
    CHECK(run_cli("compile --config run3.cfg", dir).exit_code == 0);
    CHECK(file_bytes(dir / "out1" / "compiled_p0.cgop") == first);
    fs::remove_all(dir);
}

TEST_CASE("evolve writes traces and summaries") {
    const auto dir = make_dir("su3lgt_cli_evolve");
    SUBCASE("t = 0 gives a single-record trace") {
        write_config(dir / "run.cfg",
                     "dimension = 1\nextents = 1\nlambda = 1\nt = 0\nsteps = 0\noutput = out\n");
        const auto r = run_cli("evolve --config run.cfg", dir);
        CHECK(r.exit_code == 0);
        const std::string csv = file_bytes(dir / "out" / "trace.csv");
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one record
    }
    SUBCASE("noisy run with p = 0 reports acceptance 1") {
        write_config(dir / "run.cfg",
                     "dimension = 1\nextents = 1\nlambda = 1\nt = 0.5\nsteps = 5\n"
                     "error_p = 1e-9\nshots = 50\noutput = outn\n");
        const auto r = run_cli("evolve --config run.cfg", dir);
        CHECK(r.exit_code == 0);
        const std::string js = file_bytes(dir / "outn" / "summary.json");
        CHECK(js.find("\"acceptance\": 1.0") != std::string::npos);
    }
    SUBCASE("p-scan emits a slope") {
        write_config(dir / "run.cfg",
                     "dimension = 1\nextents = 1\nlambda = 1\nt = 0.5\nsteps = 5\n"
                     "p_scan = 0.004 0.01\nshots = 4000\noutput = outs\n");
        const auto r = run_cli("evolve --config run.cfg", dir);
        CHECK(r.exit_code == 0);
        const std::string js = file_bytes(dir / "outs" / "summary.json");
        CHECK(js.find("postselect_slope") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("verify battery and exit codes") {
    const auto dir = make_dir("su3lgt_cli_verify");
    SUBCASE("clean pass") {
        const auto r = run_cli("verify", dir);
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("FAIL") == std::string::npos);
        CHECK(r.output.find("PASS cg-identities") != std::string::npos);
    }
    SUBCASE("tolerance is overridable") {
        const auto r = run_cli("verify --tol 1e-30", dir);
        CHECK(r.exit_code == 2);  // nothing passes at an absurd tolerance
        CHECK(r.output.find("FAIL") != std::string::npos);
    }
    SUBCASE("corrupted cache is reported") {
        const fs::path cache = dir / "cache";
        fs::create_directories(cache);
        std::ofstream bad(cache / "broken.cgt");
        bad << "su3lgt-cg v1\nconvention su3cg-gt-lex-v1\nr1 1 0\nr2 1 0\nblocks 0\n"
            << "checksum 0000000000000000\n";
        bad.close();
        const auto r = run_cli("verify --cache-dir cache", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("FAIL cache broken.cgt") != std::string::npos);
    }
    SUBCASE("invalid config exits 1") {
        write_config(dir / "bad.cfg", "lambda = 99\n");
        const auto r = run_cli("build-basis --config bad.cfg", dir);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find("config error") != std::string::npos);
    }
    SUBCASE("resource cap exits 3") {
        write_config(dir / "big.cfg",
                     "dimension = 2\nextents = 2 2\nlambda = 2\nerror_p = 0.001\n"
                     "steps = 2\nshots = 10\noutput = outb\n");
        const auto r = run_cli("evolve --config big.cfg", dir);
        CHECK(r.exit_code == 3);
    }
    fs::remove_all(dir);
}
