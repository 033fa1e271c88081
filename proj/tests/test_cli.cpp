#include <doctest.h>

#include <filesystem>

#include "mbasis/config.hpp"
#include "mbasis/io.hpp"
#include "mbasis/runner.hpp"

using namespace mbasis;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mbasis_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config("# comment\ncommand = unb\nsizes = 64, 128\ncontrol = false  # trailing\n");
    CHECK(c.command == "unb");
    CHECK(c.sizes == std::vector<int>{64, 128});
    CHECK_FALSE(c.control);
    CHECK(c.truncation == 64);

    CHECK_THROWS_WITH_AS(parse_config("command = unb\n\nbogus = 1\n"), "config line 3: unknown key 'bogus'", Error);
    CHECK_THROWS_WITH_AS(parse_config("command = unb\ncommand = unb\n"), doctest::Contains("config line 2: duplicate"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_config("command = unb\ntruncation = 12x\n"),
                         doctest::Contains("config line 2: invalid value"), Error);
    CHECK_THROWS_WITH_AS(parse_config("command unb\n"), doctest::Contains("config line 1"), Error);
    CHECK_THROWS_WITH_AS(parse_config("seed = 3\n"), doctest::Contains("missing required key 'command'"), Error);
    CHECK_NOTHROW(parse_config("seed = 3\n", false));
    CHECK_THROWS_WITH_AS(parse_config("command = unb\ntruncation = 1\n"), doctest::Contains("truncation"), Error);
    CHECK_THROWS_AS(parse_config("command = fly\n"), Error);
    CHECK_THROWS_AS(parse_config("command = unb\nnet_resolution = 1.5\n"), Error);
}

TEST_CASE("numbers and CSV are deterministic") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0 / 3) == "0.333333333333");
    CHECK(format_number(1e-20) == "1e-20");
    CsvWriter a({"m", "q"}), b({"m", "q"});
    for (CsvWriter* w : {&a, &b}) {
        w->add({"1", format_number(2.5)});
        w->add({"2", format_number(1.0 / 7)});
    }
    CHECK(a.str() == b.str());
    CHECK(a.str() == "m,q\n1,2.5\n2,0.142857142857\n");
    CHECK(CsvWriter({"m", "q"}).str() == "m,q\n");
    CHECK_THROWS_AS(a.add({"1"}), Error);
}

TEST_CASE("matrix CSV round trip and errors") {
    const auto dir = scratch("matrix");
    Matrix m(2, 3);
    m << 1, 0.5, -2, 1e-13, 3, 4;
    write_matrix_csv(dir / "m.csv", m);
    CHECK((read_matrix_csv(dir / "m.csv") - m).norm() == 0);
    write_text(dir / "bad.csv", "1,2\n3,x\n");
    CHECK_THROWS_WITH_AS(read_matrix_csv(dir / "bad.csv"), doctest::Contains(":2:"), Error);
    fs::remove_all(dir);
}

TEST_CASE("stored system round trip, one vector per row") {
    const auto dir = scratch("system");
    Matrix x(3, 2), f(3, 2);
    x << 1, 0, 0.5, 1, 0, 0;
    f << 1, 0, 0, 1, 0, 0;
    f(1, 0) = -0.5;
    const System s(x, f);
    save_system(dir, s);
    CHECK(read_text(dir / "X.csv") == "1,0.5,0\n0,1,0\n");
    CHECK(read_text(dir / "system.txt").find("ambient_dim = 3") != std::string::npos);
    const System t = load_system(dir);
    CHECK((t.xs() - s.xs()).norm() == 0);
    CHECK((t.fs() - s.fs()).norm() == 0);
    write_text(dir / "system.txt", "ambient_dim = 4\n");
    CHECK_THROWS_WITH_AS(load_system(dir), doctest::Contains("system.txt:1"), Error);
    fs::remove_all(dir);
}

TEST_CASE("runner: unb writes exact columns and identical summaries across runs") {
    const auto dir = scratch("unb");
    auto cfg = parse_config("command = unb\nsizes = 64\n");
    cfg.output = (dir / "a").string();
    const auto a = run(cfg, LogLevel::quiet);
    cfg.output = (dir / "b").string();
    const auto b = run(cfg, LogLevel::quiet);
    CHECK(a.exit_code == 0);
    CHECK(a.summary.dump() == b.summary.dump());
    const auto csv = read_text(dir / "a" / "unb_64.csv");
    CHECK(csv.rfind("m,q,lambda,ratio,omega,two_phi,c1log\n", 0) == 0);
    CHECK(csv == read_text(dir / "b" / "unb_64.csv"));
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("runner: violated tail condition yields a failure record") {
    const auto dir = scratch("fail");
    auto cfg = parse_config("command = pathology\neps_scale = 1\nperm_size = 1000\ntruncation = 32\n");
    cfg.output = dir.string();
    const auto out = run(cfg, LogLevel::quiet);
    CHECK(out.exit_code != 0);
    CHECK(out.failure["invariant"] == "tail-eps");
    CHECK(out.failure["module"] == "pathology");
    CHECK(fs::exists(dir / "failure.json"));
    fs::remove_all(dir);
}
