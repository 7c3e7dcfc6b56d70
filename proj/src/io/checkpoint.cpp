#include "factcheck/io/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "factcheck/error.hpp"

namespace factcheck::io {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little endian");

constexpr std::array<char, 8> kMagic = {'F', 'C', 'K', 'P', 'T', '\0', '\0', '\1'};
constexpr std::array<char, 4> kTrailer = {'E', 'N', 'D', '\0'};
constexpr std::uint8_t kTagInt = 1, kTagStrings = 2, kTagMatrix = 3;
// Guards against absurd allocations from corrupt length fields.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <class T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void write_str(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <class T>
  T pod(const std::string& what) {
    T value;
    bytes(reinterpret_cast<char*>(&value), sizeof(T), what);
    return value;
  }

  std::string str(const std::string& what) {
    const auto n = pod<std::uint32_t>(what);
    if (n > kMaxElements) throw LoadError("checkpoint: corrupt length for " + what);
    std::string s(n, '\0');
    bytes(s.data(), n, what);
    return s;
  }

  void bytes(char* dst, std::size_t n, const std::string& what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw LoadError("checkpoint truncated while reading " + what);
  }

 private:
  std::istream& in_;
};

}  // namespace

void Archive::put_field(const std::string& name, Field value) {
  if (auto it = index_.find(name); it != index_.end()) {
    fields_[it->second].second = std::move(value);
    return;
  }
  index_[name] = fields_.size();
  fields_.emplace_back(name, std::move(value));
}

void Archive::put(const std::string& name, std::int64_t value) { put_field(name, value); }
void Archive::put(const std::string& name, std::vector<std::string> values) { put_field(name, std::move(values)); }
void Archive::put(const std::string& name, Matrix value) { put_field(name, std::move(value)); }

const Archive::Field& Archive::field(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw LoadError("checkpoint field '" + name + "' missing");
  return fields_[it->second].second;
}

std::int64_t Archive::get_int(const std::string& name) const {
  const auto* v = std::get_if<std::int64_t>(&field(name));
  if (!v) throw LoadError("checkpoint field '" + name + "' is not an integer");
  return *v;
}

const std::vector<std::string>& Archive::get_strings(const std::string& name) const {
  const auto* v = std::get_if<std::vector<std::string>>(&field(name));
  if (!v) throw LoadError("checkpoint field '" + name + "' is not a string list");
  return *v;
}

const Matrix& Archive::get_matrix(const std::string& name) const {
  const auto* v = std::get_if<Matrix>(&field(name));
  if (!v) throw LoadError("checkpoint field '" + name + "' is not a tensor");
  return *v;
}

const Matrix& Archive::get_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) const {
  const auto& m = get_matrix(name);
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << "checkpoint tensor '" << name << "' has shape " << m.rows() << "x" << m.cols()
        << ", expected " << rows << "x" << cols;
    throw LoadError(msg.str());
  }
  return m;
}

void Archive::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  write_pod<std::uint32_t>(out, kCheckpointVersion);
  write_str(out, kind_);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(fields_.size()));
  for (const auto& [name, value] : fields_) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
      write_pod<std::uint8_t>(out, kTagInt);
      write_str(out, name);
      write_pod<std::int64_t>(out, *i);
    } else if (const auto* s = std::get_if<std::vector<std::string>>(&value)) {
      write_pod<std::uint8_t>(out, kTagStrings);
      write_str(out, name);
      write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s->size()));
      for (const auto& item : *s) write_str(out, item);
    } else {
      const auto& m = std::get<Matrix>(value);
      write_pod<std::uint8_t>(out, kTagMatrix);
      write_str(out, name);
      write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
      write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
      out.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
  }
  out.write(kTrailer.data(), kTrailer.size());
}

Archive Archive::read(std::istream& in, const std::string& expected_kind) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw LoadError("not a checkpoint file (bad magic)");
  const auto version = r.pod<std::uint32_t>("format version");
  if (version != kCheckpointVersion) {
    std::ostringstream msg;
    msg << "checkpoint format version " << version << " unsupported (expected " << kCheckpointVersion << ")";
    throw LoadError(msg.str());
  }
  Archive archive(r.str("model kind"));
  if (!expected_kind.empty() && archive.kind_ != expected_kind)
    throw LoadError("checkpoint model kind is '" + archive.kind_ + "', expected '" + expected_kind + "'");

  const auto count = r.pod<std::uint32_t>("field count");
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto tag = r.pod<std::uint8_t>("field tag");
    const auto name = r.str("field name");
    switch (tag) {
      case kTagInt:
        archive.put(name, r.pod<std::int64_t>(name));
        break;
      case kTagStrings: {
        const auto n = r.pod<std::uint32_t>(name);
        if (n > kMaxElements) throw LoadError("checkpoint: corrupt length for " + name);
        std::vector<std::string> items;
        items.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) items.push_back(r.str(name));
        archive.put(name, std::move(items));
        break;
      }
      case kTagMatrix: {
        const auto rows = r.pod<std::uint64_t>(name);
        const auto cols = r.pod<std::uint64_t>(name);
        if (rows > kMaxElements || cols > kMaxElements || rows * cols > kMaxElements)
          throw LoadError("checkpoint: corrupt shape for " + name);
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        r.bytes(reinterpret_cast<char*>(m.data()), rows * cols * sizeof(double), name);
        archive.put(name, std::move(m));
        break;
      }
      default:
        throw LoadError("checkpoint field '" + name + "' has unknown tag");
    }
  }
  std::array<char, 4> trailer{};
  r.bytes(trailer.data(), trailer.size(), "end marker");
  if (trailer != kTrailer) throw LoadError("checkpoint end marker corrupt");
  return archive;
}

void Archive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write(out);
  out.flush();
  if (!out) throw Error("failed writing checkpoint '" + path.string() + "'");
}

Archive Archive::load(const std::filesystem::path& path, const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint '" + path.string() + "'");
  return read(in, expected_kind);
}

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

}  // namespace factcheck::io
