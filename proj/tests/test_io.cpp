#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "qb/io.hpp"
#include "qb/samplers.hpp"
#include "test_util.hpp"

using namespace qb;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("qb_io_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("format_double round-trips exactly") {
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> unit(-1e6, 1e6);
    for (int rep = 0; rep < 1000; ++rep) {
        const double x = unit(rng) * std::pow(10.0, static_cast<int>(rng() % 30) - 15);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("mean sample files round-trip bitwise") {
    TempDir dir;
    MeanTupleStream stream(means1d_scenario(82));
    std::vector<ProductPoint> samples;
    for (int i = 0; i < 40; ++i) samples.push_back(*stream.next());

    const std::string path = dir.file("means.csv");
    write_mean_samples(path, samples);
    const SampleFile parsed = read_samples(path);

    CHECK(parsed.components == 5);
    CHECK(parsed.dim == 1);
    CHECK_FALSE(parsed.gaussian);
    REQUIRE(parsed.mean_tuples.size() == samples.size());
    for (std::size_t n = 0; n < samples.size(); ++n) {
        CHECK(parsed.mean_tuples[n] == samples[n]);
    }
}

TEST_CASE("gaussian sample files round-trip bitwise") {
    TempDir dir;
    GmmStream stream(ellipse_scenario(83));
    std::vector<GaussianTuple> samples;
    for (int i = 0; i < 25; ++i) samples.push_back(*stream.next());

    const std::string path = dir.file("gauss.csv");
    write_gaussian_samples(path, samples);
    const SampleFile parsed = read_samples(path);

    CHECK(parsed.components == 5);
    CHECK(parsed.dim == 2);
    CHECK(parsed.gaussian);
    REQUIRE(parsed.gaussian_tuples.size() == samples.size());
    for (std::size_t n = 0; n < samples.size(); ++n) {
        for (std::size_t k = 0; k < samples[n].size(); ++k) {
            CHECK(parsed.gaussian_tuples[n][k].mean == samples[n][k].mean);
            CHECK(parsed.gaussian_tuples[n][k].covariance == samples[n][k].covariance);
        }
    }
}

TEST_CASE("an optional trailing logp column is parsed") {
    TempDir dir;
    const std::string path = dir.file("withlogp.csv");
    {
        std::ofstream out(path);
        out << "m0_0,m1_0,logp\n";
        out << "1.5,2.5,-3.25\n";
        out << "0.5,0.25,-1.0\n";
    }
    const SampleFile parsed = read_samples(path);
    CHECK(parsed.components == 2);
    CHECK(parsed.dim == 1);
    REQUIRE(parsed.log_density.size() == 2);
    CHECK(parsed.log_density[0] == -3.25);
    CHECK(parsed.log_density[1] == -1.0);
}

TEST_CASE("malformed rows are reported with their row number") {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    {
        std::ofstream out(path);
        out << "m0_0,m1_0\n";
        out << "1.0,2.0\n";
        out << "1.0,oops\n";
    }
    CHECK_THROWS_WITH_AS(read_samples(path), doctest::Contains("row 3"), ContractError);

    const std::string ragged = dir.file("ragged.csv");
    {
        std::ofstream out(ragged);
        out << "m0_0,m1_0\n";
        out << "1.0\n";
    }
    CHECK_THROWS_WITH_AS(read_samples(ragged), doctest::Contains("row 2"), ContractError);

    CHECK_THROWS_AS(read_samples(dir.file("missing.csv")), IoError);
}

TEST_CASE("result records round-trip losslessly") {
    TempDir dir;
    std::vector<Json> records;
    records.push_back(Json{{"schema", 1},
                           {"command", "test"},
                           {"metrics", {{"value", 0.1234567890123456789}, {"count", 42}}}});
    records.push_back(Json{{"schema", 1}, {"trace", {1.0, 0.5, 1e-17}}});

    const std::string path = dir.file("results.jsonl");
    write_results(path, records);
    const auto parsed = read_results(path);
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(parsed[i] == records[i]);
}

TEST_CASE("kv config parsing, sections and overrides") {
    TempDir dir;
    const std::string path = dir.file("run.conf");
    {
        std::ofstream out(path);
        out << "# a comment\n";
        out << "seed = 99\n";
        out << "sgd.iters=1234\n";
        out << "mra.snr_grid = 0.5,1,2  # trailing comment\n";
        out << "\n";
    }
    KvConfig cfg = KvConfig::load(path);
    CHECK(cfg.get_u64("seed", 0) == 99);
    CHECK(cfg.get_long("sgd.iters", 0) == 1234);
    CHECK(cfg.get_string("mra.snr_grid", "") == "0.5,1,2");
    CHECK(cfg.get_long("absent", -5) == -5);

    cfg.set("seed", "100");
    CHECK(cfg.get_u64("seed", 0) == 100);

    cfg.set("seed", "not_a_number");
    CHECK_THROWS_AS(cfg.get_u64("seed", 0), ConfigError);

    const std::string bad = dir.file("bad.conf");
    {
        std::ofstream out(bad);
        out << "just a line without equals\n";
    }
    CHECK_THROWS_AS(KvConfig::load(bad), ConfigError);
}
