#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "kqic/data_model.hpp"
#include "kqic/errors.hpp"
#include "test_support.hpp"

using namespace kqic;

TEST_CASE("csv rows parse into a dataset", "[data_model]") {
    std::istringstream in("entry,time,event\n1,4,1\n2,5,1\n3,6,1\n");
    const Dataset d = load_csv(in);
    REQUIRE(d.size() == 3);
    CHECK(d == testing::d3());
    CHECK(d.event_count() == 3);
    CHECK_FALSE(d.has_groups());
}

TEST_CASE("csv invariant violation reports its line", "[data_model]") {
    std::istringstream in("entry,time,event\n1,4,1\n5,5,0\n");
    try {
        (void)load_csv(in);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("csv malformed fields report their line", "[data_model]") {
    std::istringstream bad_number("entry,time,event\n1,abc,1\n");
    CHECK_THROWS_AS(load_csv(bad_number), ParseError);
    std::istringstream bad_event("entry,time,event\n1,2,1\n1,2,2\n");
    try {
        (void)load_csv(bad_event);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream missing_column("entry,time\n1,2\n");
    CHECK_THROWS_AS(load_csv(missing_column), DataError);
}

TEST_CASE("csv accepts BOM, CRLF, reordered columns and groups", "[data_model]") {
    std::istringstream in("\xEF\xBB\xBFgroup,event,time,entry\r\nm,1,4,1\r\nf,0,5,2\r\n\r\nm,1,6,3\r\n");
    const Dataset d = load_csv(in);
    REQUIRE(d.size() == 3);
    CHECK(d.has_groups());
    CHECK(d.entry(1) == 2.0);
    CHECK_FALSE(d.event(1));
    const auto parts = d.split_by_group();
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].first == "m");
    CHECK(parts[0].second.size() == 2);
    CHECK(parts[1].first == "f");
}

TEST_CASE("write_csv round trips exactly", "[data_model]") {
    const Dataset d = testing::e6();
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    CHECK(load_csv(in) == d);
}

TEST_CASE("validate collects every violation", "[data_model]") {
    const std::vector<RawTriple> ok = {{1, 4, 1}, {2, 5, 0}};
    CHECK(Dataset::validate(ok).size() == 2);

    const std::vector<RawTriple> reversed = {{4, 1, 1}};
    CHECK_THROWS_AS(Dataset::validate(reversed), ValidationError);

    const std::vector<RawTriple> bad = {{0, 1, 1}, {0, 1, 2}, {-1, 2, 1}};
    try {
        (void)Dataset::validate(bad);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations().size() == 2);
        CHECK(e.violations()[0].index == 1);
        CHECK(e.violations()[1].index == 2);
    }
}

TEST_CASE("summary counts events", "[data_model]") {
    CHECK(summarize(testing::d3()).event_fraction == 1.0);
    CHECK(summarize(testing::d3c()).event_fraction == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("subset and with_entries", "[data_model]") {
    const Dataset d = testing::d3c();
    const std::vector<std::size_t> idx = {2, 0};
    const Dataset s = d.subset(idx);
    REQUIRE(s.size() == 2);
    CHECK(s.entry(0) == 3.0);
    const std::vector<double> entries = {0.5, 0.5, 0.5};
    CHECK(d.with_entries(entries).entry(2) == 0.5);
    const std::vector<double> invalid = {0.5, 5.0, 0.5};
    CHECK_THROWS_AS(d.with_entries(invalid), ValidationError);
}
