#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "svipipe/config.hpp"
#include "svipipe/csv.hpp"

using namespace svipipe;

TEST_CASE("csv parsing handles quoting rules") {
    const std::string doc =
        "id,name,notes\r\n"
        "1,\"with, comma\",plain\r\n"
        "2,\"quote \"\" inside\",\"line\nbreak\"\r\n";
    const auto records = csv::parse(doc);
    REQUIRE(records.size() == 3);
    CHECK(records[1][1] == "with, comma");
    CHECK(records[2][1] == "quote \" inside");
    CHECK(records[2][2] == "line\nbreak");
}

TEST_CASE("csv round-trip property on adversarial fields") {
    std::mt19937_64 rng(4242);
    const std::string alphabet = "ab,\"\n\r x";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 12);

    csv::Table t;
    t.header = {"a", "b", "c"};
    for (int row = 0; row < 60; ++row) {
        std::vector<std::string> cells;
        for (int c = 0; c < 3; ++c) {
            std::string field;
            const int n = len(rng);
            for (int i = 0; i < n; ++i) field += alphabet[pick(rng)];
            cells.push_back(field);
        }
        t.rows.push_back(cells);
    }

    std::ostringstream out;
    csv::write(out, t);
    std::istringstream in(out.str());
    const csv::Table back = csv::read(in);

    REQUIRE(back.rows.size() == t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        CHECK(back.rows[r] == t.rows[r]);
    }
}

TEST_CASE("blank lines between csv records are tolerated") {
    const std::string doc = "a,b\n1,2\n\n3,4\n";
    std::istringstream in(doc);
    const csv::Table t = csv::read(in);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == "4");
}

TEST_CASE("csv errors") {
    CHECK_THROWS(csv::parse("a,\"unterminated"));
    CHECK_THROWS(csv::read_file("/nonexistent/file.csv"));
    csv::Table t;
    t.header = {"x"};
    CHECK(t.column("missing") == -1);
    CHECK_THROWS(t.require_column("missing"));
}

TEST_CASE("config parses tables, scalars and arrays") {
    const auto cfg = config::Config::parse(R"(
# pipeline settings
top = "level"

[cluster]
k = 5
seed = 42
threshold = 1.5
enabled = true
indicators = ["a", "b", "c"]
weights = [1, 2.5, 3]

[provider]
name = "mock"   # trailing comment
)");

    CHECK(cfg.get_string("top") == "level");
    CHECK(cfg.get_int("cluster.k", 0) == 5);
    CHECK(cfg.get_int("cluster.seed", 0) == 42);
    CHECK(cfg.get_double("cluster.threshold", 0.0) == 1.5);
    CHECK(cfg.get_bool("cluster.enabled", false));
    CHECK(cfg.get_string_array("cluster.indicators") ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(cfg.get_number_array("cluster.weights") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(cfg.get_string("provider.name") == "mock");
    CHECK(cfg.get_string("absent.key", "fallback") == "fallback");
}

TEST_CASE("config rejects malformed input and unknown keys") {
    CHECK_THROWS(config::Config::parse("key without equals"));
    CHECK_THROWS(config::Config::parse("[unterminated\nk = 1"));
    CHECK_THROWS(config::Config::parse("k = \"open string"));
    CHECK_THROWS(config::Config::parse("k = 1\nk = 2"));

    const auto cfg = config::Config::parse("[a]\nx = 1\ny = 2");
    CHECK_NOTHROW(cfg.reject_unknown_keys({"a.x", "a.y"}));
    CHECK_THROWS(cfg.reject_unknown_keys({"a.x"}));
}

TEST_CASE("config type mismatches are loud") {
    const auto cfg = config::Config::parse("k = \"text\"\nn = 3");
    CHECK_THROWS(cfg.get_int("k", 0));
    CHECK_THROWS(cfg.get_bool("n", false));
    CHECK(cfg.get_double("n", 0.0) == 3.0);
    CHECK_THROWS(cfg.require_string("missing"));
}
