#include "arm/nn/checkpoint.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "arm/errors.hpp"

namespace arm::nn {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'M', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kByteOrderMark = 0x01020304u;
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 1;
constexpr std::uint8_t kDtypeF64 = 2;

static_assert(std::endian::native == std::endian::little, "checkpoint code assumes a little-endian host");

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  const char* take(std::size_t n) {
    need(n);
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw FormatError("checkpoint truncated");
  }
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_params(const ParamSet& params) {
  std::string out(kMagic, sizeof(kMagic));
  put(out, kByteOrderMark);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    put(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put(out, sizeof(Real) == 4 ? kDtypeF32 : kDtypeF64);
    put(out, static_cast<std::uint8_t>(t.shape().size()));
    for (int d : t.shape()) put(out, static_cast<std::uint32_t>(d));
    out.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(Real));
  }
  put(out, fnv1a(out.data(), out.size()));
  return out;
}

ParamSet decode_params(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 12 + 8) throw FormatError("checkpoint truncated");
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, 8);
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError("bad checkpoint magic");
  if (stored != fnv1a(bytes.data(), body)) throw FormatError("checkpoint checksum mismatch");

  Reader r(bytes, body);
  r.take(sizeof(kMagic));
  if (r.get<std::uint32_t>() != kByteOrderMark) throw FormatError("unsupported byte order");
  if (r.get<std::uint32_t>() != kVersion) throw FormatError("unsupported checkpoint version");
  const auto count = r.get<std::uint32_t>();
  ParamSet params;
  for (std::uint32_t e = 0; e < count; ++e) {
    const auto len = r.get<std::uint32_t>();
    std::string name(r.take(len), len);
    const auto dtype = r.get<std::uint8_t>();
    const auto rank = r.get<std::uint8_t>();
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<int>(r.get<std::uint32_t>());
    Tensor t(shape);
    if (dtype == kDtypeF32) {
      const char* p = r.take(t.size() * 4);
      for (std::size_t i = 0; i < t.size(); ++i) {
        float v;
        std::memcpy(&v, p + 4 * i, 4);
        t[i] = static_cast<Real>(v);
      }
    } else if (dtype == kDtypeF64) {
      const char* p = r.take(t.size() * 8);
      for (std::size_t i = 0; i < t.size(); ++i) {
        double v;
        std::memcpy(&v, p + 8 * i, 8);
        t[i] = static_cast<Real>(v);
      }
    } else {
      throw FormatError("unknown dtype in checkpoint");
    }
    params.add(name, std::move(t));
  }
  if (!r.done()) throw FormatError("trailing bytes in checkpoint");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params) {
  static std::atomic<unsigned> counter{0};
  const std::string bytes = encode_params(params);
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "_" +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ParamSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_params(ss.str());
}

}  // namespace arm::nn
