#include <doctest.h>

#include "mmdim/cli.hpp"
#include "mmdim/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mmdim;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("mmdim_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = path_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("build, load and serialize round-trip byte for byte") {
    TempDir dir;
    const std::vector<std::string> specs{
        R"({"n": 2, "kind": "geometric", "B": "1", "r": "1", "kMax": 3})",
        R"({"n": 3, "kind": "quadratic", "B": "1/10", "kMax": 2})",
        R"({"n": 2, "kind": "sparse", "r": "1", "kMax": 5})",
        R"({"n": 2, "kind": "two_block", "alpha": "2/3", "beta": "1", "kMax": 2})",
        R"({"n": 2, "kind": "geometric", "r": "1/2", "kMax": 2})",
        R"({"n": 3, "kind": "identity"})"};
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const std::string spec = dir.write("spec" + std::to_string(i) + ".json", specs[i]);
        const std::string sys = dir.file("sys" + std::to_string(i) + ".json");
        const Run b = run({"build", spec, "--out", sys});
        CHECK_MESSAGE(b.code == kExitOk, b.err);
        const std::string text = slurp(sys);
        CHECK(serialize_system(load_system(text)) == text);
        CHECK(run({"build", spec}).out == text);
        CHECK(run({"validate", sys}).code == kExitOk);
    }
}

TEST_CASE("spec rejections name the field") {
    TempDir dir;
    struct Bad {
        std::string text;
        std::string field;
    };
    const std::vector<Bad> bad{{R"({"n": 2, "kind": "geometric", "r": "0"})", "r"},
                               {R"({"n": 2, "kind": "geometric", "r": "-1"})", "r"},
                               {R"({"n": 2, "kind": "geometric"})", "r"},
                               {R"({"n": 1, "kind": "geometric", "r": "1"})", "n"},
                               {R"({"n": 2, "kind": "geometric", "r": "1", "B": "0"})", "B"},
                               {R"({"n": 2, "kind": "quadratic", "r": "1"})", "r"},
                               {R"({"n": 2, "kind": "cubic"})", "kind"},
                               {R"({"n": 2, "kind": "geometric", "r": "1", "colour": 3})", "colour"},
                               {R"({"n": 2, "kind": "two_block", "alpha": "1", "beta": "1/2"})", "alpha"},
                               {R"({"n": 2, "kind": "geometric", "r": "1", "legScheduleOverride": [3, 4]})",
                                "legScheduleOverride"}};
    for (std::size_t i = 0; i < bad.size(); ++i) {
        const std::string path = dir.write("bad" + std::to_string(i) + ".json", bad[i].text);
        const Run r = run({"build", path});
        CHECK_MESSAGE(r.code == kExitUsage, bad[i].text);
        CHECK_MESSAGE(r.err.find(bad[i].field) != std::string::npos, r.err);
        CHECK(r.out.empty());
    }
    CHECK(run({"build", dir.file("missing.json")}).code == kExitUsage);
    CHECK(run({"build", dir.write("junk.json", "{not json")}).code == kExitUsage);
}

TEST_CASE("tampered systems are caught") {
    TempDir dir;
    const std::string spec = dir.write("s.json", R"({"n": 2, "kind": "geometric", "r": "1", "kMax": 2})");
    const std::string text = run({"build", spec}).out;
    // stretch factor of the first piece: 5 becomes 4
    std::string bad = text;
    const auto pos = bad.find("\"5/1\"");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 5, "\"4/1\"");
    const std::string path = dir.write("bad.json", bad);
    const Run v = run({"validate", path});
    CHECK(v.code == kExitFail);
    CHECK(v.out.find("FAIL") != std::string::npos);
    CHECK(run({"profile", path}).code == kExitUsage);
}

TEST_CASE("exit codes and flag order") {
    TempDir dir;
    const std::string spec = dir.write("s.json", R"({"n": 2, "kind": "geometric", "r": "1", "kMax": 24})");
    const std::string sys = dir.file("sys.json");
    REQUIRE(run({"build", spec, "-o", sys}).code == kExitOk);

    const Run a = run({"verify", sys, "--tol", "0.02"});
    const Run b = run({"--threads", "2", "verify", "--tol", "0.02", sys});
    CHECK(a.code == kExitOk);
    CHECK(b.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find("result: pass") != std::string::npos);
    CHECK(run({"verify", sys, "--tol", "0.001"}).code == kExitFail);

    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"estimate", sys}).code == kExitUsage);
    CHECK(run({"estimate", sys, "--k", "1", "--eps", "abc"}).code == kExitUsage);
    CHECK(run({"estimate", sys, "--k", "1", "--seeds", "grid:0"}).code == kExitUsage);
    CHECK(run({"--budget", "lots", "estimate", sys, "--k", "1"}).code == kExitUsage);
    CHECK(run({"estimate", sys, "--k", "30", "--m", "1,2"}).code == kExitUsage);
}

TEST_CASE("profile and estimate CSV") {
    TempDir dir;
    const std::string spec = dir.write("s.json", R"({"n": 2, "kind": "geometric", "r": "1", "kMax": 3})");
    const std::string sys = dir.file("sys.json");
    REQUIRE(run({"build", spec, "-o", sys}).code == kExitOk);

    const Run p = run({"profile", sys, "--k-last", "6"});
    REQUIRE(p.code == kExitOk);
    std::istringstream lines(p.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == csv_header());
    std::getline(lines, line);
    CHECK(line.rfind("1,1/15,", 0) == 0);
    CHECK(line.find(",symbolic,") != std::string::npos);
    int rows = 1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 6);
    CHECK(p.err.find("liminf estimate") != std::string::npos);

    const Run e = run({"estimate", sys, "--k", "1", "--m", "1,2,3"});
    REQUIRE(e.code == kExitOk);
    CHECK(e.out.find("9;81;729") != std::string::npos);
    CHECK(e.out.find("0.4367859") != std::string::npos);
    const Run e2 = run({"estimate", "--m", "3,2,1", sys, "--k", "1"});
    CHECK(e2.out == e.out);

    const std::string csv = dir.file("p.csv");
    CHECK(run({"profile", sys, "--k-last", "4", "--out", csv}).code == kExitOk);
    CHECK(slurp(csv).rfind(csv_header(), 0) == 0);
}
