#include "bibliostat/error.hpp"
#include "bibliostat/tsv.hpp"

#include "support.hpp"

#include <doctest.h>

#include <fstream>

namespace tsv = bibliostat::tsv;

TEST_SUITE("tsv") {
  TEST_CASE("reading skips comments and blank lines and keeps line numbers") {
    const auto dir = support::temp_dir("tsv");
    const auto path = dir / "x.tsv";
    std::ofstream(path) << "# header comment\n\na\tb\r\nc\t\n";
    const auto rows = tsv::read(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].line == 3);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(rows[1].fields == std::vector<std::string>{"c", ""});
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("missing file") {
    CHECK_THROWS_AS(tsv::read("/nonexistent/file.tsv"), bibliostat::ValidationError);
  }

  TEST_CASE("number formatting round-trips") {
    CHECK(tsv::format(0.1) == "0.1");
    CHECK(tsv::format(2.0) == "2");
    CHECK(tsv::format(1.0 / 3.0) == "0.3333333333333333");
    CHECK(tsv::format(std::optional<double>{}) == "");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(tsv::format(v)) == v);
  }

  TEST_CASE("tables write and load") {
    tsv::Table t({"k", "v"});
    t.add({"a", "1"});
    t.add({"b", ""});
    CHECK(t.str() == "k\tv\na\t1\nb\t\n");
    const auto dir = support::temp_dir("tsv2");
    t.write(dir / "t.tsv");
    const auto back = tsv::Table::load(dir / "t.tsv");
    CHECK(back.header() == t.header());
    CHECK(back.data() == t.data());
    std::filesystem::remove_all(dir);
  }
}
