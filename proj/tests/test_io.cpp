#include <doctest.h>

#include <string>

#include "collapse/raster_io.hpp"

using namespace collapse;

TEST_SUITE("io") {
  TEST_CASE("PGM golden bytes, latest row first") {
    FieldRaster r;
    r.rows = 2;
    r.cols = 3;
    r.cells = {0.0, 1.0, 0.5, 1.0, 1.0, 0.0};
    const std::string got = encode_pgm(r, {"seed = 4"});
    const std::string want = std::string("P5\n# seed = 4\n3 2\n255\n") +
                             std::string{'\x00', '\x00', '\xff', '\xff', '\x00', '\x80'};
    CHECK(got == want);
    std::vector<std::string> comments;
    const FieldRaster back = decode_pgm(got, &comments);
    CHECK(comments == std::vector<std::string>{"seed = 4"});
    CHECK(back.rows == 2);
    CHECK(back.cells == std::vector<double>{0.0, 1.0, 127.0 / 255.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(encode_pgm(r, {"two\nlines"}), OutputError);
    CHECK_THROWS_AS(decode_pgm("P6\n1 1\n255\n\x00"), OutputError);
  }

  TEST_CASE("gray levels") {
    CHECK(gray_level(0.0) == 255);
    CHECK(gray_level(1.0) == 0);
    CHECK(gray_level(0.25) == 191);
    CHECK(gray_level(-2.0) == 255);
  }

  TEST_CASE("CSV quoting and comments") {
    CsvTable t({"a", "b"}, {"x = 1"});
    t.add_row({"1", "he said \"hi\", twice"});
    CHECK(t.encode() == "# x = 1\r\na,b\r\n1,\"he said \"\"hi\"\", twice\"\r\n");
    CHECK_THROWS_AS(t.add_row({"only one"}), OutputError);
  }

  TEST_CASE("numbers round-trip") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_number(-0.0) == "-0");
  }
}
