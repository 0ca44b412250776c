#include "asq/snapshot.hpp"

#include "asq/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace asq {

namespace {

constexpr char magic[4] = {'F', 'S', 'Q', 'G'};
constexpr std::size_t header_size = 4 + 1 + 4;

template <class U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFFu));
  }
}

template <class U>
U get_le(const std::uint8_t* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(p[i]) << (8 * i);
  return value;
}

} // namespace

std::vector<std::uint8_t> encode_snapshot(const PhysicalGrid& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(header_size + 8 * grid.values.size());
  out.insert(out.end(), std::begin(magic), std::end(magic));
  out.push_back(snapshot_version);
  put_le(out, static_cast<std::uint32_t>(grid.n));
  for (double v : grid.values) put_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

PhysicalGrid decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < header_size || std::memcmp(bytes.data(), magic, 4) != 0) {
    throw Error("snapshot: bad magic");
  }
  if (bytes[4] != snapshot_version) {
    throw Error("snapshot: unsupported version " + std::to_string(int(bytes[4])));
  }
  const auto n = get_le<std::uint32_t>(bytes.data() + 5);
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (bytes.size() != header_size + 8 * count) throw Error("snapshot: truncated payload");
  PhysicalGrid grid(static_cast<int>(n));
  for (std::size_t i = 0; i < count; ++i) {
    grid.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + header_size + 8 * i));
  }
  return grid;
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& field) {
  const auto bytes = encode_snapshot(to_physical(field));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("snapshot: cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SpectralField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("snapshot: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  const auto grid = decode_snapshot(bytes);
  return to_spectral(grid, FourierLattice(grid.n));
}

} // namespace asq
