#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bpred/core/dataset_io.hpp"
#include "bpred/core/stats.hpp"
#include "bpred/core/text.hpp"
#include "bpred/sim/simulator.hpp"
#include "helpers.hpp"

using namespace bpred;

namespace {

Dataset tiny_dataset(std::size_t samples) {
    Dataset d;
    d.catalog = sim::feature_catalog();
    Situation s;
    s.situation_id = 7;
    for (std::size_t i = 0; i < samples; ++i) {
        Sample smp;
        smp.situation_id = 7;
        smp.t_rec = frame_time(i);
        smp.features.assign(d.catalog.size(), 0.0);
        for (std::size_t f = 0; f < smp.features.size(); ++f) smp.features[f] = 0.1 * static_cast<double>(f) + 1e-17 * i;
        smp.ttlcl = i == 0 ? 3.0 : kInf;
        s.samples.push_back(smp);
        s.track.push_back({30.0 * frame_time(i), 0.1 / 3.0});
        s.markings.push_back({1.75, -1.75});
    }
    d.situations.push_back(s);
    return d;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("shortest decimal formatting round-trips") {
    bpred::Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double v = rng.normal(0.0, 1e3) * std::pow(10.0, static_cast<int>(rng.index(20)) - 10);
        const auto back = parse_double(format_double(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
    CHECK(format_double(kInf) == "inf");
    CHECK(*parse_double("-inf") == -kInf);
    CHECK_FALSE(parse_double("nan").has_value());
    CHECK_FALSE(parse_double("NaN").has_value());
    CHECK_FALSE(parse_double("1.5x").has_value());
    CHECK_FALSE(parse_double("").has_value());
}

TEST_CASE("empty dataset saves a header and reloads empty") {
    testutil::TempDir dir("core_empty");
    Dataset d;
    d.catalog = sim::feature_catalog();
    save_dataset(d, dir.path);
    std::ifstream in(dir.path / "dataset.csv");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 1);
    CHECK(load_dataset(dir.path) == d);
}

TEST_CASE("one situation with three samples round-trips exactly") {
    testutil::TempDir dir("core_rt");
    const auto d = tiny_dataset(3);
    save_dataset(d, dir.path);
    const auto back = load_dataset(dir.path);
    CHECK(back.sample_count() == 3);
    CHECK(back == d);
}

}  // TEST_SUITE core

TEST_SUITE("derived") {

TEST_CASE("NaN cell in a required column is a parse error naming the row") {
    testutil::TempDir dir("core_nan");
    save_dataset(tiny_dataset(3), dir.path);
    const auto file = dir.path / "dataset.csv";
    std::ifstream in(file);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    REQUIRE(lines.size() == 4);
    // second data row, column t_rec
    auto& row = lines[2];
    const auto a = row.find(',');
    const auto b = row.find(',', a + 1);
    row = row.substr(0, a + 1) + "NaN" + row.substr(b);
    std::ofstream out(file);
    for (const auto& l : lines) out << l << '\n';
    out.close();
    try {
        load_dataset(dir.path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
}

}  // TEST_SUITE derived

TEST_SUITE("core") {

TEST_CASE("unknown feature id in the header is rejected") {
    testutil::TempDir dir("core_hdr");
    save_dataset(tiny_dataset(1), dir.path);
    const auto file = dir.path / "dataset.csv";
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    in.close();
    auto text = ss.str();
    const auto pos = text.find("v_y");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "zzz");
    std::ofstream(file) << text;
    CHECK_THROWS_AS(load_dataset(dir.path), ParseError);
}

TEST_CASE("average ranks share ties") {
    const auto r = average_ranks({10.0, 20.0, 20.0, 5.0});
    CHECK(r == std::vector<double>{2.0, 3.5, 3.5, 1.0});
    CHECK_THROWS_AS(pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DomainError);
}

}  // TEST_SUITE core
