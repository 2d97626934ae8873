#include "xfel/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "xfel/error.hpp"

namespace xfel {
namespace {

constexpr char magic[16] = {'X', 'F', 'E', 'L', 'W', 'A', 'V', 'E', '0', '0', '0', '1', 0, 0, 0, 0};

template <class T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("snapshot truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::string encode_snapshot(const Field& f) {
  std::string out(magic, sizeof(magic));
  out.reserve(sizeof(magic) + 12 + f.size() * 16);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n_per_axis));
  put_le<double>(out, f.grid().half_length);
  for (const auto& v : f.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  return out;
}

Field decode_snapshot(const std::string& bytes) {
  if (bytes.size() < sizeof(magic) || std::memcmp(bytes.data(), magic, sizeof(magic)) != 0)
    throw IoError("not a field snapshot (bad magic)");
  std::size_t pos = sizeof(magic);
  auto n = get_le<std::uint32_t>(bytes, pos);
  auto half_length = get_le<double>(bytes, pos);
  GridSpec grid{static_cast<int>(n), half_length};
  try {
    grid.validate();
  } catch (const InvalidGrid& e) {
    throw IoError(std::string("snapshot header: ") + e.what());
  }
  std::vector<cplx> values(grid.size());
  if (bytes.size() != pos + values.size() * 16)
    throw IoError("snapshot size does not match header");
  for (auto& v : values) {
    double re = get_le<double>(bytes, pos);
    double im = get_le<double>(bytes, pos);
    v = {re, im};
  }
  return Field(grid, std::move(values));
}

void write_snapshot(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  std::string bytes = encode_snapshot(f);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace xfel
