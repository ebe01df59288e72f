#include <doctest.h>

#include "strongcomp/cli.hpp"
#include "strongcomp/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace strongcomp;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "strongcomp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("strongcomp_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path configs = STRONGCOMP_CONFIG_DIR;

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == cli::exit_usage);
    CHECK(run({"frob"}).code == cli::exit_usage);
    CHECK(run({"solve", "--out", "x"}).code == cli::exit_usage);
    const auto dir = fresh_dir("usage");
    CHECK(run({"solve", "--config", (dir / "missing.json").string(), "--out", dir.string()}).code ==
          cli::exit_usage);
    {
        std::ofstream(dir / "bad.json") << R"({"model": {"lamda": 1}})";
    }
    const auto bad = run({"solve", "--config", (dir / "bad.json").string(), "--out", dir.string()});
    CHECK(bad.code == cli::exit_usage);
    CHECK(bad.err.find("unknown key 'model.lamda'") != std::string::npos);
    CHECK(run({"solve", "--config", (configs / "scenario_a.json").string(), "--out", dir.string(), "--set",
               "bogus=1"})
              .code == cli::exit_usage);
    CHECK(run({"analyze", "--config", (configs / "scenario_a.json").string(), "--out", dir.string()}).code ==
          cli::exit_usage);
    fs::remove_all(dir);
}

TEST_CASE("solve on Scenario A writes the equilibrium") {
    const auto dir = fresh_dir("solve");
    const auto r = run({"solve", "--config", (configs / "scenario_a.json").string(), "--out", dir.string()});
    CHECK(r.code == cli::exit_ok);
    const auto snap = read_snapshot(dir / "snapshot.tsv");
    for (std::size_t q = 0; q < snap.state.u.size(); ++q) {
        CHECK(std::abs(snap.state.u[q] - 0.2) <= 1e-6);
        CHECK(std::abs(snap.state.w[0][q] - 0.8) <= 1e-6);
    }
    CHECK(fs::exists(dir / "solve_report.tsv"));
    CHECK(fs::exists(dir / "solve_report.json"));

    const auto a = run({"analyze", "--config", (configs / "scenario_a.json").string(), "--out", dir.string()});
    CHECK(a.code == cli::exit_ok);
    CHECK(fs::exists(dir / "bounds.tsv"));
    CHECK(fs::exists(dir / "survivors.tsv"));
    const auto e = run({"eig", "--config", (configs / "scenario_a.json").string(), "--out", dir.string()});
    CHECK(e.code == cli::exit_ok);
    CHECK(fs::exists(dir / "eig.tsv"));
    fs::remove_all(dir);
}

TEST_CASE("non-convergence exits 1") {
    const auto dir = fresh_dir("nonconv");
    const auto r = run({"solve", "--config", (configs / "scenario_a.json").string(), "--out", dir.string(),
                        "--set", "solve.max_steps=2"});
    CHECK(r.code == cli::exit_check_failed);
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical") {
    const auto d1 = fresh_dir("det1");
    const auto d2 = fresh_dir("det2");
    for (const auto& d : {d1, d2}) {
        const auto r = run({"sweep", "--config", (configs / "scenario_b.json").string(), "--out", d.string(),
                            "--set", "continuation.count=3", "--set", "grid.counts=[201]"});
        REQUIRE(r.code == cli::exit_ok);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        ++files;
        CHECK(slurp(entry.path()) == slurp(d2 / entry.path().filename()));
    }
    CHECK(files >= 5);
    fs::remove_all(d1);
    fs::remove_all(d2);
}
