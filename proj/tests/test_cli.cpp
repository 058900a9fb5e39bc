#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "quakenet/mlp.hpp"
#include "quakenet/record_io.hpp"

namespace fs = std::filesystem;
using namespace quakenet;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("quakenet_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

struct SeedEnv {
    explicit SeedEnv(const char* value) { ::setenv("QUAKE_SEED", value, 1); }
    ~SeedEnv() { ::unsetenv("QUAKE_SEED"); }
};

std::string small_config(const std::string& record) {
    return "mode=accel_to_response\nrecord=" + record +
           "\nomega=2\nhidden=3\nmax_epochs=20\nfactors=0.8,1.0,1.2\nseed=1\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"bogus"}).code == 1);
    CHECK(run_cli({"respond", "--omega", "1"}).code == 1);
    const auto r = run_cli({"respond", "--record", "x", "--omega", "abc"});
    CHECK(r.code == 1);
    CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("help exits 0") {
    const auto r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("respond") != std::string::npos);
    CHECK(run_cli({"spectrum", "--help"}).code == 0);
}

TEST_CASE("respond on a zero record writes zeros") {
    TempDir dir;
    write_text(dir / "zero.txt", "dt=0.02\n0\n0\n0\n0\n");
    const auto r = run_cli({"respond", "--record", (dir / "zero.txt").string(), "--omega", "1.5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto table = read_csv(in);
    CHECK(table.header == std::vector<std::string>{"t", "desired"});
    CHECK(table.rows() == 4);
    for (double x : table.column("desired")) CHECK(x == 0.0);
}

TEST_CASE("data and domain errors") {
    TempDir dir;
    CHECK(run_cli({"respond", "--record", (dir / "missing.txt").string(), "--omega", "1"}).code == 2);
    write_text(dir / "bad.txt", "t,accel\n0,0\n0.02,1\n0.05,0\n");
    CHECK(run_cli({"respond", "--record", (dir / "bad.txt").string(), "--omega", "1"}).code == 2);
    write_text(dir / "ok.txt", "dt=0.02\n0\n1\n0\n");
    CHECK(run_cli({"respond", "--record", (dir / "ok.txt").string(), "--omega", "-1"}).code == 3);
    CHECK(run_cli({"gen", "--peak", "0"}).code == 3);
    CHECK(run_cli({"gen", "--kind", "square"}).code == 1);
}

TEST_CASE("predict with a multi-input network in pointwise mode exits 2") {
    TempDir dir;
    write_text(dir / "rec.txt", "dt=0.02\n0\n0.1\n-0.1\n");
    std::ofstream weights(dir / "w.txt");
    save_weights(StoredModel{MlpNetwork(2, 3, 1), {}, {}}, weights);
    weights.close();
    const auto r = run_cli({"predict", "--weights", (dir / "w.txt").string(), "--record",
                            (dir / "rec.txt").string(), "--omega", "1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("dimension") != std::string::npos);
}

TEST_CASE("gen, spectrum and respond agree with the library and are re-parseable") {
    TempDir dir;
    const auto rec_path = (dir / "sine.txt").string();
    REQUIRE(run_cli({"gen", "--kind", "sine", "-o", rec_path}).code == 0);
    const auto rec = parse_record_file(rec_path);
    CHECK(rec.size() == 747);

    const auto spec_path = (dir / "spec.csv").string();
    REQUIRE(run_cli({"spectrum", "--record", rec_path, "--period-max", "2", "--period-step", "0.5",
                     "--threads", "2", "-o", spec_path})
                .code == 0);
    std::ifstream in(spec_path);
    const auto table = read_csv(in);
    const auto periods = period_sweep(0.5, 2.0, 0.5);
    const auto expect = response_spectrum(rec, periods, DampingSpec::ratio(0.05));
    CHECK(table.column("peak") == expect.peaks);

    const auto a = run_cli({"respond", "--record", rec_path, "--omega", "2", "--damping", "0.1",
                            "--damping-kind", "rate"});
    const auto b = run_cli({"respond", "--record", rec_path, "--omega", "2", "--damping", "0.1",
                            "--damping-kind", "rate", "--solver", "incremental"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    std::istringstream ia(a.out), ib(b.out);
    const auto ta = read_csv(ia), tb = read_csv(ib);
    for (std::size_t i = 0; i < ta.rows(); ++i)
        CHECK(std::abs(ta.column("desired")[i] - tb.column("desired")[i]) < 1e-12);
}

TEST_CASE("eval: desired peaks scale with the factors and outputs are byte-identical") {
    TempDir dir;
    REQUIRE(run_cli({"gen", "--kind", "noise", "--duration", "3", "-o", (dir / "rec.txt").string()}).code == 0);
    write_text(dir / "exp.cfg", small_config("rec.txt"));
    const auto cfg = (dir / "exp.cfg").string();

    const auto first = run_cli({"eval", "--config", cfg, "--curves", (dir / "c1").string(),
                                "--weights-out", (dir / "w1.txt").string()});
    REQUIRE(first.code == 0);
    std::istringstream in(first.out);
    const auto table = read_csv(in);
    const auto& peaks = table.column("desired_peak");
    REQUIRE(peaks.size() == 3);
    CHECK(std::abs(peaks[0] / peaks[1] - 0.8) <= 1e-9);
    CHECK(std::abs(peaks[2] / peaks[1] - 1.2) <= 1e-9);
    CHECK(fs::exists(dir / "c1_0p8.csv"));
    CHECK(fs::exists(dir / "c1_1.csv"));

    const auto second = run_cli({"eval", "--config", cfg, "--curves", (dir / "c2").string(),
                                 "--weights-out", (dir / "w2.txt").string()});
    CHECK(second.out == first.out);
    CHECK(slurp(dir / "c1_1p2.csv") == slurp(dir / "c2_1p2.csv"));
    CHECK(slurp(dir / "w1.txt") == slurp(dir / "w2.txt"));

    const auto reuse = run_cli({"eval", "--config", cfg, "--weights", (dir / "w1.txt").string()});
    CHECK(reuse.out == first.out);
}

TEST_CASE("train writes weights and a report; predict uses them") {
    TempDir dir;
    REQUIRE(run_cli({"gen", "--duration", "2", "-o", (dir / "rec.txt").string()}).code == 0);
    write_text(dir / "exp.cfg", small_config("rec.txt"));
    const auto r = run_cli({"train", "--config", (dir / "exp.cfg").string(), "--weights",
                            (dir / "w.txt").string(), "--report", (dir / "report.csv").string()});
    REQUIRE(r.code == 0);
    std::ifstream rep(dir / "report.csv");
    CHECK(read_csv(rep).rows() == 20);
    const auto p = run_cli({"predict", "--weights", (dir / "w.txt").string(), "--record",
                            (dir / "rec.txt").string(), "--omega", "2", "--factor", "0.8"});
    REQUIRE(p.code == 0);
    std::istringstream in(p.out);
    const auto table = read_csv(in);
    CHECK(table.header == std::vector<std::string>{"t", "desired", "predicted"});
    CHECK(table.rows() == 101);
}

TEST_CASE("seed precedence: flag over QUAKE_SEED over config") {
    TempDir dir;
    REQUIRE(run_cli({"gen", "--duration", "1", "-o", (dir / "rec.txt").string()}).code == 0);
    write_text(dir / "exp.cfg", small_config("rec.txt"));
    const auto cfg = (dir / "exp.cfg").string();
    auto weights_for = [&](std::vector<std::string> extra) {
        const auto path = (dir / "w.txt").string();
        std::vector<std::string> args{"train", "--config", cfg, "--weights", path};
        args.insert(args.end(), extra.begin(), extra.end());
        REQUIRE(run_cli(args).code == 0);
        return slurp(path);
    };
    const auto seed1 = weights_for({});
    const auto seed5 = weights_for({"--seed", "5"});
    CHECK(seed1 != seed5);
    {
        SeedEnv env("5");
        CHECK(weights_for({}) == seed5);
        CHECK(weights_for({"--seed", "1"}) == seed1);
    }
    {
        SeedEnv env("not-a-seed");
        CHECK(run_cli({"train", "--config", cfg, "--weights", (dir / "x.txt").string()}).code == 1);
    }
}

TEST_CASE("config errors") {
    TempDir dir;
    REQUIRE(run_cli({"gen", "--duration", "1", "-o", (dir / "rec.txt").string()}).code == 0);
    write_text(dir / "typo.cfg", small_config("rec.txt") + "hiden=4\n");
    CHECK(run_cli({"eval", "--config", (dir / "typo.cfg").string()}).code == 1);
    write_text(dir / "range.cfg", small_config("rec.txt") + "beta=-1\n");
    CHECK(run_cli({"eval", "--config", (dir / "range.cfg").string()}).code == 3);
    write_text(dir / "norec.cfg", small_config("missing.txt"));
    CHECK(run_cli({"eval", "--config", (dir / "norec.cfg").string()}).code == 2);
}

}  // TEST_SUITE
