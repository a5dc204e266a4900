#include "kac/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace kac {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b, std::size_t limit) : bytes_(b), limit_(limit) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > limit_) throw SnapshotError("snapshot truncated");
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1U << 30));
    c = crc32(c, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const SnapshotRecord& rec) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'K', 'A', 'C', '1'});
  put<std::uint16_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, 1);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(2 * rec.coupling.half_range()));
  put<double>(out, rec.coupling.lambda());
  put<double>(out, rec.beta);
  put<std::int64_t>(out, rec.spins.first());
  put<std::int64_t>(out, rec.spins.end());
  put<std::uint64_t>(out, rec.step);
  put<std::uint64_t>(out, rec.seed);
  const std::size_t n = rec.spins.size();
  std::vector<std::uint8_t> bits((n + 7) / 8, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rec.spins[i] == 1) bits[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
  }
  out.insert(out.end(), bits.begin(), bits.end());
  put<std::uint32_t>(out, crc_of(out.data(), out.size()));
  return out;
}

SnapshotRecord decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 + 2 + 4 || std::memcmp(bytes.data(), "KAC1", 4) != 0) {
    throw SnapshotError("bad snapshot magic");
  }
  Reader r(bytes, bytes.size() - 4);
  r.get<std::uint32_t>();
  const auto version = r.get<std::uint16_t>();
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  }
  std::uint32_t stored = 0;
  for (std::size_t k = 0; k < 4; ++k) stored |= std::uint32_t{bytes[bytes.size() - 4 + k]} << (8 * k);
  if (stored != crc_of(bytes.data(), bytes.size() - 4)) throw SnapshotError("snapshot CRC mismatch");

  const auto num = r.get<std::uint64_t>();
  const auto den = r.get<std::uint64_t>();
  const auto lambda = r.get<double>();
  SnapshotRecord rec;
  if (num != 1 || den % 2 != 0) throw SnapshotError("snapshot gamma is not of the form 1/(2k)");
  rec.coupling = CouplingSpec::from_half_range(static_cast<std::int64_t>(den / 2), lambda);
  rec.beta = r.get<double>();
  const auto first = r.get<std::int64_t>();
  const auto end = r.get<std::int64_t>();
  rec.step = r.get<std::uint64_t>();
  rec.seed = r.get<std::uint64_t>();
  if (end < first) throw SnapshotError("snapshot bounds inverted");
  const auto n = static_cast<std::size_t>(end - first);
  if (bytes.size() - 4 - r.pos() != (n + 7) / 8) throw SnapshotError("snapshot payload size mismatch");
  std::vector<Spin> v(n);
  const std::uint8_t* bits = bytes.data() + r.pos();
  for (std::size_t i = 0; i < n; ++i) v[i] = (bits[i / 8] >> (i % 8)) & 1U ? Spin{1} : Spin{-1};
  rec.spins = SpinConfig(first, std::move(v), BoundaryCondition::free());
  return rec;
}

void write_snapshot(const std::filesystem::path& path, const SnapshotRecord& rec) {
  const auto bytes = encode_snapshot(rec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SnapshotError("write failed for " + path.string());
}

SnapshotRecord read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace kac
