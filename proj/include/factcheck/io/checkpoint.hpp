#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "factcheck/types.hpp"

namespace factcheck::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Versioned, dimension-tagged dump of named fields. Layout (little endian):
//   "FCKPT\0\0\1" | u32 version | str kind | u32 count | count x field | "END\0"
//   field  = u8 tag | str name | payload
//   tag 1: i64              tag 2: u32 n, n x str
//   tag 3: u64 rows, u64 cols, rows*cols x f64 (row-major)
//   str    = u32 length | bytes
// Doubles are stored as raw IEEE-754 bits, so a round trip is exact.
class Archive {
 public:
  using Field = std::variant<std::int64_t, std::vector<std::string>, Matrix>;

  explicit Archive(std::string kind = {}) : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

  void put(const std::string& name, std::int64_t value);
  void put(const std::string& name, std::vector<std::string> values);
  void put(const std::string& name, Matrix value);

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  std::int64_t get_int(const std::string& name) const;
  const std::vector<std::string>& get_strings(const std::string& name) const;
  const Matrix& get_matrix(const std::string& name) const;
  // Throws LoadError naming the field when the stored shape differs.
  const Matrix& get_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) const;

  void write(std::ostream& out) const;
  // Throws LoadError on bad magic, version mismatch, kind mismatch (when
  // expected_kind is non-empty) or truncation, naming the offending field.
  static Archive read(std::istream& in, const std::string& expected_kind = {});

  void save(const std::filesystem::path& path) const;
  static Archive load(const std::filesystem::path& path, const std::string& expected_kind = {});

 private:
  const Field& field(const std::string& name) const;
  void put_field(const std::string& name, Field value);

  std::string kind_;
  std::vector<std::pair<std::string, Field>> fields_;
  std::map<std::string, std::size_t> index_;
};

// Short stable identifier for a file's bytes (FNV-1a 64, hex).
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace factcheck::io
