#include "mcl/episode_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "mcl/error.hpp"

namespace mcl {
namespace {

constexpr std::size_t kBinaryHeaderBytes = 4 + 2 + 4 * 4;

// ---- text -------------------------------------------------------------------

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      tokens.clear();
      std::string_view rest(line_);
      while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r");
        if (start == std::string_view::npos) break;
        rest.remove_prefix(start);
        const auto end = rest.find_first_of(" \t\r");
        tokens.push_back(rest.substr(0, end));
        rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      }
      if (tokens.empty() || tokens.front().front() == '#') continue;
      return true;
    }
    return false;
  }

  long line() const noexcept { return line_no_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(line_no_) + ": " + what, line_no_);
  }

 private:
  std::istream& in_;
  std::string line_;
  long line_no_ = 0;
};

std::size_t parse_count(const LineReader& reader, std::string_view token, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    reader.fail(std::string("expected an unsigned integer for ") + what + ", got '" +
                std::string(token) + "'");
  return value;
}

double parse_value(const LineReader& reader, std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
    reader.fail("invalid number '" + std::string(token) + "'");
  return value;
}

FeatureMatrix read_text_matrix(LineReader& reader, std::size_t d, std::size_t r,
                               const std::string& label) {
  Matrix m(d, r);
  std::vector<std::string_view> tokens;
  for (std::size_t i = 0; i < d; ++i) {
    if (!reader.next(tokens)) reader.fail(label + ": unexpected end of file in row " + std::to_string(i));
    if (tokens.size() != r)
      throw DimensionError("line " + std::to_string(reader.line()) + ": " + label + " row " +
                           std::to_string(i) + " has " + std::to_string(tokens.size()) +
                           " values, expected r=" + std::to_string(r));
    for (std::size_t j = 0; j < r; ++j) m(i, j) = parse_value(reader, tokens[j]);
  }
  return FeatureMatrix(std::move(m));
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void append_text_matrix(std::string& out, const FeatureMatrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.count(); ++j) {
      if (j > 0) out.push_back(' ');
      append_number(out, m(i, j));
    }
    out.push_back('\n');
  }
}

// ---- binary -----------------------------------------------------------------

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(in[at + b]);
  return v;
}

void put_f32(std::string& out, float f) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, &f, sizeof bits);
  put_u32(out, bits);
}

float get_f32(const std::string& in, std::size_t at) {
  const std::uint32_t bits = get_u32(in, at);
  float f = 0.0f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw ValidationError(std::string("episode ") + what + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

void append_binary_matrix(std::string& out, const FeatureMatrix& m, const std::string& label) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.count(); ++j) {
      const double v = m(i, j);
      if (std::abs(v) > static_cast<double>(std::numeric_limits<float>::max()))
        throw ValidationError(label + ": value " + std::to_string(v) +
                              " overflows the binary format's float32");
      put_f32(out, static_cast<float>(v));
    }
}

FeatureMatrix read_binary_matrix(const std::string& in, std::size_t& at, std::size_t d,
                                 std::size_t r, const std::string& label) {
  Matrix m(d, r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const float f = get_f32(in, at);
      if (!std::isfinite(f))
        throw FormatError("byte " + std::to_string(at) + ": " + label + " holds a non-finite value",
                          static_cast<long>(at));
      m(i, j) = f;
      at += 4;
    }
  return FeatureMatrix(std::move(m));
}

std::string label_for(std::size_t c, std::size_t k) {
  return "class " + std::to_string(c) + " shot " + std::to_string(k);
}

void validate_file(const EpisodeFile& file) {
  if (file.shots.empty()) throw DimensionError("episode file has no classes");
  const std::size_t k = file.shots.front().size();
  if (k == 0) throw DimensionError("class 0 has no shots");
  for (std::size_t c = 0; c < file.shots.size(); ++c) {
    if (file.shots[c].size() != k)
      throw DimensionError("class " + std::to_string(c) + " has " +
                           std::to_string(file.shots[c].size()) + " shots, expected K=" +
                           std::to_string(k));
    for (std::size_t s = 0; s < k; ++s) {
      const FeatureMatrix& m = file.shots[c][s];
      if (m.dim() != file.d || m.count() != file.r)
        throw DimensionError(label_for(c, s) + " is " + std::to_string(m.dim()) + "x" +
                             std::to_string(m.count()) + ", expected " + std::to_string(file.d) +
                             "x" + std::to_string(file.r));
    }
  }
  if (file.query.dim() != file.d || file.query.count() != file.r)
    throw DimensionError("query does not match the declared dims");
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return std::move(buf).str();
}

}  // namespace

Episode EpisodeFile::to_episode() const {
  validate_file(*this);
  return build_episode(shots, query);
}

EpisodeFile EpisodeFile::from_episode(const Episode& episode) {
  std::vector<std::vector<FeatureMatrix>> shots;
  for (const FeatureMatrix& s : episode.supports()) shots.push_back({s});
  return EpisodeFile{episode.dim(), episode.features_per_image(), std::move(shots),
                     episode.query()};
}

EpisodeFile parse_episode_text(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string_view> tokens;

  if (!reader.next(tokens) || tokens.front() != kTextMagic)
    reader.fail(std::string("missing '") + kTextMagic + " <version>' header");
  if (tokens.size() != 2) reader.fail("header must be '" + std::string(kTextMagic) + " <version>'");
  const std::size_t version = parse_count(reader, tokens[1], "version");
  if (version != kEpisodeFormatVersion)
    reader.fail("unsupported episode format version " + std::to_string(version) +
                " (this build reads version " + std::to_string(kEpisodeFormatVersion) + ")");

  if (!reader.next(tokens) || tokens.front() != "dims" || tokens.size() != 5)
    reader.fail("expected 'dims <d> <r> <N> <K>'");
  const std::size_t d = parse_count(reader, tokens[1], "d");
  const std::size_t r = parse_count(reader, tokens[2], "r");
  const std::size_t n = parse_count(reader, tokens[3], "N");
  const std::size_t k = parse_count(reader, tokens[4], "K");
  if (d == 0 || r == 0 || n == 0 || k == 0) reader.fail("d, r, N and K must all be >= 1");

  std::vector<std::vector<FeatureMatrix>> shots(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t s = 0; s < k; ++s) {
      if (!reader.next(tokens)) reader.fail("unexpected end of file, expected " + label_for(c, s));
      if (tokens.size() != 3 || tokens[0] != "shot" ||
          parse_count(reader, tokens[1], "class index") != c ||
          parse_count(reader, tokens[2], "shot index") != s)
        reader.fail("expected 'shot " + std::to_string(c) + " " + std::to_string(s) + "'");
      shots[c].push_back(read_text_matrix(reader, d, r, label_for(c, s)));
    }
  }
  if (!reader.next(tokens) || tokens.size() != 1 || tokens[0] != "query")
    reader.fail("expected 'query'");
  FeatureMatrix query = read_text_matrix(reader, d, r, "query");
  if (reader.next(tokens)) reader.fail("unexpected trailing content");
  return EpisodeFile{d, r, std::move(shots), std::move(query)};
}

std::string serialize_episode_text(const EpisodeFile& file) {
  validate_file(file);
  std::string out = std::string(kTextMagic) + " " + std::to_string(kEpisodeFormatVersion) + "\n";
  out += "dims " + std::to_string(file.d) + " " + std::to_string(file.r) + " " +
         std::to_string(file.n_classes()) + " " + std::to_string(file.k_shots()) + "\n";
  for (std::size_t c = 0; c < file.n_classes(); ++c)
    for (std::size_t s = 0; s < file.k_shots(); ++s) {
      out += "shot " + std::to_string(c) + " " + std::to_string(s) + "\n";
      append_text_matrix(out, file.shots[c][s]);
    }
  out += "query\n";
  append_text_matrix(out, file.query);
  return out;
}

EpisodeFile parse_episode_binary(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kBinaryMagic, 4) != 0)
    throw FormatError("byte 0: bad magic, expected 'MCLE'", 0);
  if (bytes.size() < kBinaryHeaderBytes)
    throw FormatError("byte " + std::to_string(bytes.size()) + ": truncated header",
                      static_cast<long>(bytes.size()));
  const auto version = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[4]) |
                                                  (static_cast<unsigned char>(bytes[5]) << 8));
  if (version != kEpisodeFormatVersion)
    throw FormatError("byte 4: unsupported episode format version " + std::to_string(version) +
                          " (this build reads version " +
                          std::to_string(kEpisodeFormatVersion) + ")",
                      4);
  const std::uint64_t d = get_u32(bytes, 6);
  const std::uint64_t r = get_u32(bytes, 10);
  const std::uint64_t n = get_u32(bytes, 14);
  const std::uint64_t k = get_u32(bytes, 18);
  if (d == 0 || r == 0 || n == 0 || k == 0)
    throw FormatError("byte 6: d, r, N and K must all be >= 1", 6);

  const std::uint64_t payload = bytes.size() - kBinaryHeaderBytes;
  // Every factor is < 2^32; compare in steps so the product cannot overflow.
  const std::uint64_t matrix_bytes = d * r * 4;
  const std::uint64_t matrices = n * k + 1;
  if (matrix_bytes == 0 || payload % matrix_bytes != 0 || payload / matrix_bytes != matrices)
    throw FormatError("byte " + std::to_string(bytes.size()) + ": payload size does not match " +
                          "declared dims (d=" + std::to_string(d) + " r=" + std::to_string(r) +
                          " N=" + std::to_string(n) + " K=" + std::to_string(k) + ")",
                      static_cast<long>(bytes.size()));

  std::size_t at = kBinaryHeaderBytes;
  std::vector<std::vector<FeatureMatrix>> shots(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t s = 0; s < k; ++s)
      shots[c].push_back(read_binary_matrix(bytes, at, d, r, label_for(c, s)));
  FeatureMatrix query = read_binary_matrix(bytes, at, d, r, "query");
  return EpisodeFile{d, r, std::move(shots), std::move(query)};
}

std::string serialize_episode_binary(const EpisodeFile& file) {
  validate_file(file);
  std::string out(kBinaryMagic, 4);
  put_u16(out, kEpisodeFormatVersion);
  put_u32(out, checked_u32(file.d, "d"));
  put_u32(out, checked_u32(file.r, "r"));
  put_u32(out, checked_u32(file.n_classes(), "N"));
  put_u32(out, checked_u32(file.k_shots(), "K"));
  for (std::size_t c = 0; c < file.n_classes(); ++c)
    for (std::size_t s = 0; s < file.k_shots(); ++s)
      append_binary_matrix(out, file.shots[c][s], label_for(c, s));
  append_binary_matrix(out, file.query, "query");
  return out;
}

EpisodeFile read_episode_file(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  try {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kBinaryMagic, 4) == 0)
      return parse_episode_binary(bytes);
    std::istringstream in(bytes);
    return parse_episode_text(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  } catch (const DimensionError& e) {
    throw DimensionError(path.string() + ": " + e.what());
  }
}

Episode load_episode(const std::filesystem::path& path) { return read_episode_file(path).to_episode(); }

void save_episode_file(const EpisodeFile& file, const std::filesystem::path& path,
                       FileVariant variant) {
  const std::string bytes = variant == FileVariant::Binary ? serialize_episode_binary(file)
                                                           : serialize_episode_text(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

void save_episode(const Episode& episode, const std::filesystem::path& path, FileVariant variant) {
  save_episode_file(EpisodeFile::from_episode(episode), path, variant);
}

}  // namespace mcl
