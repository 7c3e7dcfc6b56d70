#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/io/checkpoint.hpp"

using namespace factcheck;

TEST_CASE("archive round trip") {
  io::Archive a("demo");
  Matrix m(2, 3);
  m << 1.0 / 3, -0.0, 1e-300, 7, std::nextafter(1.0, 2.0), -5.5;
  a.put("count", std::int64_t{-42});
  a.put("names", std::vector<std::string>{"x", "", "long name"});
  a.put("weights", m);
  std::stringstream buf;
  a.write(buf);
  const auto b = io::Archive::read(buf, "demo");
  CHECK(b.kind() == "demo");
  CHECK(b.get_int("count") == -42);
  CHECK(b.get_strings("names") == std::vector<std::string>{"x", "", "long name"});
  CHECK(b.get_matrix("weights") == m);
  CHECK(std::signbit(b.get_matrix("weights")(0, 1)));
  CHECK_THROWS_WITH_AS(b.get_matrix("weights", 3, 2), doctest::Contains("weights"), LoadError);
  CHECK_THROWS_WITH_AS(b.get_int("missing"), doctest::Contains("missing"), LoadError);
  CHECK_THROWS_AS(b.get_int("names"), LoadError);
}

TEST_CASE("archive load errors") {
  io::Archive a("demo");
  a.put("weights", Matrix::Ones(4, 4));
  std::stringstream buf;
  a.write(buf);
  const std::string bytes = buf.str();

  std::stringstream wrong_kind(bytes);
  CHECK_THROWS_WITH_AS(io::Archive::read(wrong_kind, "other"), doctest::Contains("kind"), LoadError);

  std::stringstream cut(bytes.substr(0, bytes.size() - 40));
  CHECK_THROWS_WITH_AS(io::Archive::read(cut), doctest::Contains("weights"), LoadError);

  std::string bumped = bytes;
  bumped[8] = 9;  // version field
  std::stringstream version(bumped);
  CHECK_THROWS_WITH_AS(io::Archive::read(version), doctest::Contains("version"), LoadError);

  std::stringstream magic("not a checkpoint at all");
  CHECK_THROWS_AS(io::Archive::read(magic), LoadError);

  CHECK_THROWS_AS(io::Archive::load("/nonexistent/file.ckpt"), LoadError);
}

TEST_CASE("fingerprints are stable and content-sensitive") {
  const auto dir = std::filesystem::temp_directory_path() / "factcheck_unit";
  std::filesystem::create_directories(dir);
  io::Archive a("demo");
  a.put("n", std::int64_t{1});
  a.save(dir / "a.ckpt");
  a.save(dir / "b.ckpt");
  a.put("m", std::int64_t{2});
  a.save(dir / "c.ckpt");
  CHECK(io::file_fingerprint(dir / "a.ckpt") == io::file_fingerprint(dir / "b.ckpt"));
  CHECK(io::file_fingerprint(dir / "a.ckpt") != io::file_fingerprint(dir / "c.ckpt"));
  CHECK(io::file_fingerprint(dir / "a.ckpt").size() == 16);
}
