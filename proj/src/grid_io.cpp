#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "anosov/conjugacy.hpp"

namespace anosov {

static_assert(std::endian::native == std::endian::little, "grid files are written in host order");

namespace {

constexpr char kMagic[8] = {'A', 'N', 'O', 'C', 'O', 'N', 'J', '1'};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::pair<std::string, std::string>> meta_lines(const GridMeta& m) {
  return {
      {"matrix", std::to_string(m.m.a) + "," + std::to_string(m.m.b) + "," + std::to_string(m.m.c) + "," +
                     std::to_string(m.m.d)},
      {"k", std::to_string(m.k)},
      {"center", fmt_double(m.center.x) + "," + fmt_double(m.center.y)},
      {"r", fmt_double(m.r)},
      {"t", fmt_double(m.t)},
      {"profile", to_string(m.profile)},
      {"alpha", fmt_double(m.alpha)},
      {"resolution", std::to_string(m.resolution)},
      {"tol", fmt_double(m.tol)},
      {"truncation", std::to_string(m.truncation)},
  };
}

template <class T>
void put(std::string& buf, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  buf.append(b, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& data, std::size_t end) : d_(data), end_(end) {}
  template <class T>
  T get(const char* field) {
    if (pos_ + sizeof(T) > end_) throw GridFormatError(field, "truncated file");
    T v;
    std::memcpy(&v, d_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n, const char* field) {
    if (pos_ + n > end_) throw GridFormatError(field, "truncated file");
    std::string s = d_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& d_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t byte_checksum(const unsigned char* data, std::size_t n) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += data[i];
  return s;
}

void save_grid(const ConjugacyGrid& g, const std::string& path) {
  std::string buf(kMagic, 8);
  const auto lines = meta_lines(g.meta);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(lines.size()));
  for (const auto& [key, val] : lines) {
    const std::string l = key + "=" + val;
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(l.size()));
    buf += l;
  }
  buf.append(reinterpret_cast<const char*>(g.ux.data()), g.ux.size() * sizeof(double));
  buf.append(reinterpret_cast<const char*>(g.uy.data()), g.uy.size() * sizeof(double));
  put<std::uint64_t>(buf, byte_checksum(reinterpret_cast<const unsigned char*>(buf.data()), buf.size()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

ConjugacyGrid load_grid(const std::string& path, const GridMeta* expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.size() < 8 + 4 + 8) throw GridFormatError("magic", "file too short");
  if (std::memcmp(data.data(), kMagic, 8) != 0) throw GridFormatError("magic", "expected ANOCONJ1");
  const std::size_t body = data.size() - 8;
  std::uint64_t stored;
  std::memcpy(&stored, data.data() + body, 8);
  if (stored != byte_checksum(reinterpret_cast<const unsigned char*>(data.data()), body))
    throw GridFormatError("checksum", "mismatch");

  Reader rd(data, body);
  rd.bytes(8, "magic");
  const auto nlines = rd.get<std::uint32_t>("metadata count");
  std::map<std::string, std::string> kv;
  for (std::uint32_t i = 0; i < nlines; ++i) {
    const auto len = rd.get<std::uint32_t>("metadata length");
    const std::string line = rd.bytes(len, "metadata line");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw GridFormatError("metadata line", "missing '=' in '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw GridFormatError(key, "missing");
    return it->second;
  };
  auto num = [&](const char* key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(field(key), &used);
      if (used != field(key).size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::logic_error&) {
      throw GridFormatError(key, "not a number: '" + field(key) + "'");
    }
  };
  auto pair = [&](const char* key, std::size_t count) {
    std::vector<double> out;
    std::stringstream s(field(key));
    std::string item;
    while (std::getline(s, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        throw GridFormatError(key, "bad component '" + item + "'");
      }
    }
    if (out.size() != count) throw GridFormatError(key, "expected " + std::to_string(count) + " components");
    return out;
  };

  ConjugacyGrid g;
  const auto mv = pair("matrix", 4);
  g.meta.m = {static_cast<std::int64_t>(mv[0]), static_cast<std::int64_t>(mv[1]), static_cast<std::int64_t>(mv[2]),
              static_cast<std::int64_t>(mv[3])};
  g.meta.k = static_cast<int>(num("k"));
  const auto cv = pair("center", 2);
  g.meta.center = {cv[0], cv[1]};
  g.meta.r = num("r");
  g.meta.t = num("t");
  try {
    g.meta.profile = parse_profile(field("profile"));
  } catch (const std::invalid_argument&) {
    throw GridFormatError("profile", "unknown '" + field("profile") + "'");
  }
  g.meta.alpha = num("alpha");
  g.meta.resolution = static_cast<int>(num("resolution"));
  g.meta.tol = num("tol");
  g.meta.truncation = static_cast<int>(num("truncation"));
  if (g.meta.resolution <= 0) throw GridFormatError("resolution", "must be positive");

  const std::size_t n = static_cast<std::size_t>(g.meta.resolution) * static_cast<std::size_t>(g.meta.resolution);
  if (body - rd.pos() != 2 * n * sizeof(double)) throw GridFormatError("resolution", "payload size does not match");
  g.ux.resize(n);
  g.uy.resize(n);
  std::memcpy(g.ux.data(), data.data() + rd.pos(), n * sizeof(double));
  std::memcpy(g.uy.data(), data.data() + rd.pos() + n * sizeof(double), n * sizeof(double));

  if (expect) {
    const auto want = meta_lines(*expect);
    const auto have = meta_lines(g.meta);
    for (std::size_t i = 0; i < want.size(); ++i)
      if (want[i].second != have[i].second)
        throw GridFormatError(want[i].first, "expected " + want[i].second + ", file has " + have[i].second);
  }
  return g;
}

}  // namespace anosov
