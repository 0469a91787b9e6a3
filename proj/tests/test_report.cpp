#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "gwi/errors.hpp"
#include "gwi/model.hpp"
#include "gwi/report.hpp"

using namespace gwi;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gwi_report_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("float formatting round-trips every double") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 5e-324, 1.7976931348623157e308, -0.0,
                     123456789.123456789, 2.2250738585072014e-308, -1.5e-7}) {
        std::string s = report::fmt(v);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(report::fmt(std::uint64_t{18446744073709551615ull}) ==
          "18446744073709551615");
    CHECK(report::fmt(std::int64_t{-42}) == "-42");
    // locale-proof: decimal point, not comma
    CHECK(report::fmt(0.5) == "0.5");
}

TEST_CASE("meta preserves insertion order") {
    report::Meta m;
    m.set("zebra", 1.0);
    m.set("apple", std::string("x"));
    m.set("mango", true);
    REQUIRE(m.items().size() == 3);
    CHECK(m.items()[0].first == "zebra");
    CHECK(m.items()[1].first == "apple");
    CHECK(m.items()[2].first == "mango");
    CHECK(m.items()[2].second == "true");
}

TEST_CASE("standard meta names the model") {
    GwiModel model = GwiModel::validate(PgfModel::linear_fractional(1.0),
                                        PgfModel::negative_binomial(0.5, 1.0));
    report::Meta m = report::Meta::standard(model, "dist", "distribution-recursion-oracle");
    bool saw_suite = false, saw_sigma = false, saw_conjugate = false;
    for (const auto& [k, v] : m.items()) {
        if (k == "suite") {
            saw_suite = true;
            CHECK(v == "dist");
        }
        if (k == "sigma") {
            saw_sigma = true;
            CHECK(std::strtod(v.c_str(), nullptr) == doctest::Approx(0.5));
        }
        if (k == "conjugate") {
            saw_conjugate = true;
            CHECK(v == "true");
        }
    }
    CHECK(saw_suite);
    CHECK(saw_sigma);
    CHECK(saw_conjugate);
}

TEST_CASE("tables reject ragged rows") {
    report::Table t;
    t.columns = {"a", "b"};
    t.add_row({"1", "2"});
    CHECK_THROWS_AS(t.add_row({"1"}), DomainError);
    CHECK_THROWS_AS(t.add_row({"1", "2", "3"}), DomainError);
    CHECK(t.rows.size() == 1);
}

TEST_CASE("csv layout: preamble, header, LF endings, byte reproducibility") {
    TempDir tmp;
    report::Meta meta;
    meta.set("suite", std::string("demo"));
    meta.set("value", 0.1);
    report::Table t;
    t.columns = {"n", "x"};
    t.add_row({"1", report::fmt(0.1)});
    t.add_row({"2", report::fmt(2.0 / 3.0)});

    fs::path p = tmp.path / "demo.csv";
    report::write_csv(p, meta, t);
    std::string first = slurp(p);
    report::write_csv(p, meta, t);
    CHECK(slurp(p) == first);

    CHECK(first.find('\r') == std::string::npos);
    CHECK(first.find("# suite = demo\n") != std::string::npos);
    CHECK(first.find("# value = 0.10000000000000001\n") != std::string::npos);
    CHECK(first.find("n,x\n") != std::string::npos);
    CHECK(first.find("2,0.66666666666666663\n") != std::string::npos);

    // header precedes data rows, preamble precedes header
    CHECK(first.find("# suite") < first.find("n,x"));
    CHECK(first.find("n,x") < first.find("1,0.10000000000000001"));
}

TEST_CASE("json mirrors the csv content exactly") {
    TempDir tmp;
    report::Meta meta;
    meta.set("alpha", 1.0);
    report::Table t;
    t.columns = {"j", "p"};
    t.add_row({"0", report::fmt(0.25)});

    fs::path p = tmp.path / "demo.json";
    report::write_json(p, meta, t);
    std::string first = slurp(p);
    report::write_json(p, meta, t);
    CHECK(slurp(p) == first);

    auto doc = nlohmann::json::parse(first);
    CHECK(doc["meta"]["alpha"] == "1");
    REQUIRE(doc["columns"].size() == 2);
    CHECK(doc["columns"][1] == "p");
    REQUIRE(doc["rows"].size() == 1);
    CHECK(doc["rows"][0][1] == "0.25");
}

TEST_CASE("wall clock lives only in the sidecar") {
    TempDir tmp;
    report::Meta meta;
    meta.set("suite", std::string("demo"));
    report::Table t;
    t.columns = {"n"};
    t.add_row({"1"});
    fs::path p = tmp.path / "demo.csv";
    report::write_csv(p, meta, t);
    report::write_sidecar(p);

    fs::path side = tmp.path / "demo.csv.meta.json";
    REQUIRE(fs::exists(side));
    auto doc = nlohmann::json::parse(slurp(side));
    std::string stamp = doc["written_at"];
    CHECK(stamp.size() >= 19);  // ISO 8601
    CHECK(stamp.find('T') != std::string::npos);
    CHECK(slurp(p).find(stamp) == std::string::npos);
}
