#include <doctest.h>

#include "afc/config.hpp"
#include "afc/error.hpp"
#include "afc/output.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace afc;

namespace {

KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("key value parsing") {
  KeyValueConfig c = parse("# comment\n\ndepth = 40  # peak\nname=eu\nflag = yes\nlist = 1, 2.5,inf\n");
  CHECK(c.number("depth", 0.0) == 40.0);
  CHECK(c.text("name", "") == "eu");
  CHECK(c.flag("flag", false));
  CHECK(c.numbers("list").size() == 3);
  CHECK(std::isinf(c.numbers("list")[2]));
  CHECK_FALSE(c.number("missing").has_value());
  CHECK(c.integer("missing", 7) == 7);
  CHECK(c.choice("name", {"eu", "pr"}, "pr") == "eu");
}

TEST_CASE("parse errors name the line") {
  CHECK(error_of("a = 1\nbroken\n").find("test.cfg:2") != std::string::npos);
  CHECK(error_of("= 3\n").find("test.cfg:1") != std::string::npos);
  CHECK(error_of("a =\n").find("test.cfg:1") != std::string::npos);
  std::string dup = error_of("a = 1\n\na = 2\n");
  CHECK(dup.find("test.cfg:3") != std::string::npos);
  CHECK(dup.find("repeats line 1") != std::string::npos);
}

TEST_CASE("value errors name the key and line") {
  KeyValueConfig c = parse("a = 1\nb = x\nc = 2.5\nd = maybe\n");
  CHECK_THROWS_WITH_AS(c.number("b"), doctest::Contains("test.cfg:2: key 'b'"), ConfigError);
  CHECK_THROWS_WITH_AS(c.integer("c"), doctest::Contains("test.cfg:3"), ConfigError);
  CHECK_THROWS_WITH_AS(c.flag("d", false), doctest::Contains("test.cfg:4"), ConfigError);
  CHECK_THROWS_WITH_AS(c.choice("b", {"y"}, "y"), doctest::Contains("expected one of y"), ConfigError);
  CHECK_THROWS_WITH_AS(c.required_number("z"), doctest::Contains("is required"), ConfigError);
  CHECK_THROWS_WITH_AS(c.restrict_to({"a", "c"}), doctest::Contains("test.cfg:2: key 'b': unknown key"),
                       ConfigError);
  CHECK_NOTHROW(c.restrict_to({"a", "b", "c", "d"}));
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/afc.cfg"), ConfigError);
}

TEST_CASE("csv output") {
  CsvTable t({"name", "value"});
  t.add(CsvTable::Row() << "plain" << 1.5);
  t.add(CsvTable::Row() << "with, comma" << 0.0);
  t.add(CsvTable::Row() << "say \"hi\"" << std::nan(""));
  CHECK(t.str() == "name,value\nplain,1.5\n\"with, comma\",0\n\"say \"\"hi\"\"\",nan\n");
  CHECK_THROWS_AS(t.add(CsvTable::Row() << 1), std::logic_error);
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("atomic write creates parents") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "afc_unit_atomic";
  fs::remove_all(dir);
  write_atomic((dir / "sub" / "x.txt").string(), "hello\n");
  std::ifstream in(dir / "sub" / "x.txt");
  std::string s((std::istreambuf_iterator<char>(in)), {});
  CHECK(s == "hello\n");
  fs::remove_all(dir);
}
