#include <doctest.h>

#include <robustpr/errors.hpp>
#include <robustpr_cli/pgm.hpp>

using namespace robustpr;
using namespace robustpr::cli;

TEST_SUITE("cli") {

TEST_CASE("ascii pgm with comments") {
  const auto img = parse_pgm("P2\n# made by hand\n3 2\n# max\n10\n0 5 10\n 12 1 2\n");
  CHECK(img.width == 3);
  CHECK(img.height == 2);
  CHECK(img.format == PgmFormat::Ascii);
  CHECK(img.pixels[1] == 0.5);
  CHECK(img.pixels[3] == 1.0);  // above maxval clamps
  CHECK(emit_pgm(img) == "P2\n3 2\n10\n0 5 10\n10 1 2\n");
}

TEST_CASE("binary pgm, 8 and 16 bit") {
  std::string eight = "P5\n2 1\n255\n";
  eight += static_cast<char>(0);
  eight += static_cast<char>(255);
  const auto a = parse_pgm(eight);
  CHECK(a.pixels == std::vector<double>{0.0, 1.0});
  CHECK(emit_pgm(a) == eight);

  std::string sixteen = "P5 1 1 65535 ";
  sixteen += static_cast<char>(0x80);
  sixteen += static_cast<char>(0x00);
  const auto b = parse_pgm(sixteen);
  CHECK(b.pixels[0] == 32768.0 / 65535.0);
  CHECK(parse_pgm(emit_pgm(b)).pixels == b.pixels);
}

TEST_CASE("malformed pgm") {
  CHECK_THROWS_AS(parse_pgm(""), ParseError);
  CHECK_THROWS_AS(parse_pgm("P3\n1 1\n255\n0 0 0"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n2 2\n255\n1 2 3"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P5\n2 2\n255\nab"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n0 2\n255\n"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n1 1\n70000\n1"), ParseError);
}

TEST_CASE("signal conversion clamps") {
  auto img = parse_pgm("P2 2 1 255 0 255");
  RealVector x(2);
  x << -0.5, 1.5;
  const auto out = signal_to_image(x, img);
  CHECK(out.pixels == std::vector<double>{0.0, 1.0});
  CHECK(image_to_signal(img)[1] == 1.0);
  CHECK_THROWS_AS(signal_to_image(RealVector::Zero(3), img), InvalidArgument);
}

}  // TEST_SUITE
