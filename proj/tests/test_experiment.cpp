#include "rsc/error.hpp"
#include "rsc/experiment.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rsc;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rsc_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("histogram csv") {
    const auto h = make_histogram({-1, 1}, 2, -2, 2);
    const auto csv = histogram_csv(h);
    std::istringstream is(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "bin_left,bin_right,count,density");
    CHECK(lines[1] == "-2,0,1,0.25");
    CHECK(lines[2] == "0,2,1,0.25");

    const auto csv61 = histogram_csv(make_histogram({0.1, 0.2}, 61));
    CHECK(std::count(csv61.begin(), csv61.end(), '\n') == 62);
}

TEST_CASE("semicircle overlay integrates to one over the bins") {
    const auto curve = overlay_curve(ReferenceLaw::semicircle(), -2.5, 2.5);
    double sum = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        sum += curve[i].second * (curve[i].first - curve[i - 1].first);
    }
    CHECK(std::abs(sum - 1.0) < 1e-3);
    double tensor = 0.0;
    for (const auto& [x, y] : overlay_curve(ReferenceLaw::tensor(0.8), -2.5, 2.5, 1000)) {
        tensor += y * 5.0 / 1000;
    }
    CHECK(tensor == doctest::Approx(0.8).epsilon(1e-3));
    const auto svg = histogram_svg(make_histogram({-1, 0.5, 1}, 61), ReferenceLaw::semicircle(), "t");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("config json round trip and merge") {
    ExperimentConfig c;
    c.n = {20, 30};
    c.p = {0.9, 0.6};
    c.seed = 0xABCDEF;
    c.matrix = MatrixKind::extended_signed;
    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    ExperimentConfig m;
    m.merge_json(json{{"n", 25}, {"normalize", "off"}, {"model", "upper"}});
    CHECK(m.n == std::vector<std::uint32_t>{25});
    CHECK_FALSE(m.normalize);
    CHECK(m.model == Model::upper);
    CHECK(m.d == 2);
    CHECK_THROWS_AS(m.merge_json(json{{"bogus", 1}}), InvalidArgument);
    CHECK_THROWS_AS(m.merge_json(json{{"d", "two"}}), InvalidArgument);
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.realizations = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.realizations = 1;
    c.p = {0.5};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.p = {0.5, 0.5};
    c.formats = {"png"};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("complete complex run") {
    ExperimentConfig c;
    c.n = {6};
    c.p = {1.0, 1.0};
    c.matrix = MatrixKind::unsigned_adj;
    c.normalize = false;
    c.realizations = 1;
    const auto report = run(c);
    REQUIRE(report.realizations.size() == 1);
    const auto& r = report.realizations[0];
    CHECK(r.c_hat == 1.0);
    CHECK(r.maximal == 0);
    CHECK(r.dim == 15);
    // Largest eigenvalue of the complete adjacency is the row degree (n - d) d.
    CHECK(r.eigenvalues.back() == doctest::Approx(8.0));
}

TEST_CASE("aggregates are the mean of realizations and runs are reproducible") {
    ExperimentConfig c;
    c.n = {12, 16};
    c.realizations = 4;
    c.seed = 100;
    c.workers = 2;
    const auto dir = scratch("determinism");
    c.out_dir = (dir / "a").string();
    const auto a = run(c);
    REQUIRE(a.aggregates.size() == 2);
    for (const auto& agg : a.aggregates) {
        std::vector<double> m2;
        for (const auto& r : a.realizations) {
            if (r.n == agg.n) {
                m2.push_back(r.moments[1]);
                CHECK(r.trace_identities_ok);
            }
        }
        REQUIRE(m2.size() == 4);
        double mean = 0.0;
        for (double x : m2) {
            mean += x / 4.0;
        }
        CHECK(agg.mean_moments[1] == doctest::Approx(mean));
    }
    std::vector<std::uint64_t> seeds;
    for (const auto& r : a.realizations) {
        seeds.push_back(r.seed);
    }
    CHECK(seeds == std::vector<std::uint64_t>{100, 101, 102, 103, 100, 101, 102, 103});

    c.out_dir = (dir / "b").string();
    c.workers = 1;
    run(c);
    for (const char* f : {"eigenvalues.csv", "histogram.csv", "summary.json", "histogram.svg"}) {
        CHECK(std::filesystem::exists(dir / "a" / f));
    }
    CHECK(slurp(dir / "a" / "eigenvalues.csv") == slurp(dir / "b" / "eigenvalues.csv"));
    CHECK(slurp(dir / "a" / "histogram.csv") == slurp(dir / "b" / "histogram.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("oversized dense requests name the probe fallback") {
    ExperimentConfig c;
    c.n = {30};
    c.realizations = 1;
    c.dense_cutoff = 100;
    try {
        run(c);
        FAIL("expected TooLarge");
    } catch (const TooLarge& e) {
        CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
    c.trace_probes = 20;
    const auto r = run(c);
    CHECK(r.realizations[0].eigenvalues.empty());
    CHECK(r.realizations[0].moments.size() == 12);
}

TEST_CASE("write_atomic") {
    const auto dir = scratch("atomic");
    std::filesystem::create_directories(dir);
    write_atomic(dir / "x.txt", "hello\n");
    CHECK(slurp(dir / "x.txt") == "hello\n");
    CHECK_THROWS(write_atomic(dir / "missing" / "x.txt", "hi"));
    std::filesystem::remove_all(dir);
}
