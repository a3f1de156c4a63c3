#include "serialize.h"

#include <bit>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "error.h"

namespace defembed {

namespace {

constexpr char kMagic[8] = {'D', 'E', 'F', 'E', 'M', 'B', 'E', 'D'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr const char* kTextHeader = "defembed-model";

void append_bytes(std::string& out, const void* data, std::size_t n) {
  out.append(static_cast<const char*>(data), n);
}

void put_u32(std::string& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  append_bytes(out, b, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  append_bytes(out, b, 8);
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  append_bytes(out, s.data(), s.size());
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  std::size_t offset() const { return pos_; }

  void read(void* dst, std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw DataError(path_ + ": truncated at byte offset " +
                      std::to_string(pos_) + " (need " + std::to_string(n) +
                      " more bytes)");
    }
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }

  std::uint32_t read_u32() {
    unsigned char b[4];
    read(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t read_u64() {
    unsigned char b[8];
    read(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  double read_f64() { return std::bit_cast<double>(read_u64()); }

  std::string read_string(std::size_t max_len) {
    const std::uint32_t len = read_u32();
    if (len > max_len) {
      throw DataError(path_ + ": corrupt string length " + std::to_string(len) +
                      " at byte offset " + std::to_string(pos_ - 4));
    }
    std::string s(len, '\0');
    read(s.data(), len);
    return s;
  }

  void expect_end() {
    if (pos_ != data_.size()) {
      throw DataError(path_ + ": trailing garbage at byte offset " +
                      std::to_string(pos_));
    }
  }

 private:
  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string encode_binary(const Model& m) {
  std::string out;
  append_bytes(out, kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, m.geometry == ModelGeometry::kEuclidean ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(m.dim));
  put_f64(out, m.curvature);
  put_u64(out, static_cast<std::uint64_t>(m.vocab.size()));
  put_u32(out, static_cast<std::uint32_t>(m.relations.size()));
  for (int id = 0; id < m.vocab.size(); ++id) {
    put_string(out, m.vocab.word(id));
    for (double v : m.entity(id)) put_f64(out, v);
    put_f64(out, m.subject_bias[id]);
    put_f64(out, m.object_bias[id]);
  }
  for (std::size_t r = 0; r < m.relations.size(); ++r) {
    put_string(out, std::string(RoleSet::name(static_cast<int>(r))));
    for (double v : m.relations[r].translation) put_f64(out, v);
    for (double v : m.relations[r].scale) put_f64(out, v);
  }
  return out;
}

std::string encode_text(const Model& m) {
  std::ostringstream out;
  out << kTextHeader << ' ' << kFormatVersion << '\n';
  out << "geometry " << geometry_name(m.geometry) << '\n';
  out << "dim " << m.dim << '\n';
  out << "curvature " << format_double(m.curvature) << '\n';
  out << "vocab " << m.vocab.size() << '\n';
  out << "roles " << m.relations.size() << '\n';
  for (int id = 0; id < m.vocab.size(); ++id) {
    out << "entity " << m.vocab.word(id);
    for (double v : m.entity(id)) out << ' ' << format_double(v);
    out << ' ' << format_double(m.subject_bias[id]) << ' '
        << format_double(m.object_bias[id]) << '\n';
  }
  for (std::size_t r = 0; r < m.relations.size(); ++r) {
    out << "relation " << RoleSet::name(static_cast<int>(r));
    for (double v : m.relations[r].translation) out << ' ' << format_double(v);
    for (double v : m.relations[r].scale) out << ' ' << format_double(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace

// Shortest decimal form that round-trips a binary64 exactly.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp);
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw DataError("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    std::remove(tmp.c_str());
    throw DataError("rename failed for " + path + ": " +
                    std::strerror(err));
  }
}

namespace {

Model decode_binary(const std::string& data, const std::string& path) {
  ByteReader reader(data, path);
  char magic[8];
  reader.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path + ": bad magic, not a model file");
  }
  const std::uint32_t version = reader.read_u32();
  if (version != kFormatVersion) {
    throw DataError(path + ": unsupported format version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kFormatVersion) + ")");
  }
  const std::uint32_t geom = reader.read_u32();
  if (geom > 1) {
    throw DataError(path + ": corrupt geometry tag " + std::to_string(geom));
  }
  const std::uint32_t dim = reader.read_u32();
  const double curvature = reader.read_f64();
  const std::uint64_t vocab_size = reader.read_u64();
  const std::uint32_t role_count = reader.read_u32();
  if (dim == 0 || dim > (1u << 20)) {
    throw DataError(path + ": corrupt dimension " + std::to_string(dim));
  }
  if (role_count != RoleSet::kCount) {
    throw DataError(path + ": unexpected role count " +
                    std::to_string(role_count));
  }

  std::vector<std::string> words;
  words.reserve(vocab_size);
  std::vector<double> entities;
  entities.reserve(vocab_size * dim);
  std::vector<double> sbias, obias;
  sbias.reserve(vocab_size);
  obias.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    words.push_back(reader.read_string(1u << 20));
    for (std::uint32_t j = 0; j < dim; ++j) entities.push_back(reader.read_f64());
    sbias.push_back(reader.read_f64());
    obias.push_back(reader.read_f64());
  }

  Model m;
  m.geometry = geom == 0 ? ModelGeometry::kEuclidean : ModelGeometry::kHyperbolic;
  m.curvature = curvature;
  m.dim = static_cast<int>(dim);
  m.vocab = Vocabulary::from_words(words);
  // Entity records are stored in id order, which the sorted-unique
  // vocabulary reproduces; verify rather than assume.
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (m.vocab.id(words[i]) != static_cast<int>(i)) {
      throw DataError(path + ": entity records out of vocabulary order at '" +
                      words[i] + "'");
    }
  }
  m.entities = std::move(entities);
  m.subject_bias = std::move(sbias);
  m.object_bias = std::move(obias);
  m.relations.resize(role_count);
  for (std::uint32_t r = 0; r < role_count; ++r) {
    const std::string name = reader.read_string(256);
    if (name != RoleSet::name(static_cast<int>(r))) {
      throw DataError(path + ": unexpected role '" + name + "' at position " +
                      std::to_string(r));
    }
    auto& rel = m.relations[r];
    rel.translation.resize(dim);
    rel.scale.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) rel.translation[j] = reader.read_f64();
    for (std::uint32_t j = 0; j < dim; ++j) rel.scale[j] = reader.read_f64();
  }
  reader.expect_end();
  return m;
}

double parse_text_double(const std::string& tok, const std::string& path,
                         std::size_t line_no) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": malformed number '" + tok + "'");
  }
  return v;
}

Model decode_text(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) {
      throw DataError(path + ": truncated at line " + std::to_string(line_no));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  auto header_value = [&](const char* key) -> std::string {
    next_line();
    std::istringstream ss(line);
    std::string k, v;
    if (!(ss >> k >> v) || k != key) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected '" +
                      key + " <value>'");
    }
    return v;
  };

  next_line();
  {
    std::istringstream ss(line);
    std::string tag;
    std::uint32_t version = 0;
    if (!(ss >> tag >> version) || tag != kTextHeader) {
      throw DataError(path + ": not a text model file");
    }
    if (version != kFormatVersion) {
      throw DataError(path + ": unsupported format version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
    }
  }

  Model m;
  m.geometry = geometry_from_name(header_value("geometry"));
  m.dim = static_cast<int>(
      parse_text_double(header_value("dim"), path, line_no));
  m.curvature = parse_text_double(header_value("curvature"), path, line_no);
  const int vocab_size = static_cast<int>(
      parse_text_double(header_value("vocab"), path, line_no));
  const int role_count = static_cast<int>(
      parse_text_double(header_value("roles"), path, line_no));
  if (m.dim <= 0) {
    throw DataError(path + ": corrupt dimension " + std::to_string(m.dim));
  }
  if (role_count != RoleSet::kCount) {
    throw DataError(path + ": unexpected role count " +
                    std::to_string(role_count));
  }

  std::vector<std::string> words;
  words.reserve(vocab_size);
  m.entities.reserve(static_cast<std::size_t>(vocab_size) * m.dim);
  for (int i = 0; i < vocab_size; ++i) {
    next_line();
    std::istringstream ss(line);
    std::string tag, word;
    if (!(ss >> tag >> word) || tag != "entity") {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected entity record");
    }
    words.push_back(word);
    std::string tok;
    for (int j = 0; j < m.dim + 2; ++j) {
      if (!(ss >> tok)) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": entity record too short");
      }
      const double v = parse_text_double(tok, path, line_no);
      if (j < m.dim) {
        m.entities.push_back(v);
      } else if (j == m.dim) {
        m.subject_bias.push_back(v);
      } else {
        m.object_bias.push_back(v);
      }
    }
    if (ss >> tok) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": entity record too long");
    }
  }
  m.vocab = Vocabulary::from_words(words);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (m.vocab.id(words[i]) != static_cast<int>(i)) {
      throw DataError(path + ": entity records out of vocabulary order at '" +
                      words[i] + "'");
    }
  }

  m.relations.resize(role_count);
  for (int r = 0; r < role_count; ++r) {
    next_line();
    std::istringstream ss(line);
    std::string tag, name;
    if (!(ss >> tag >> name) || tag != "relation") {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected relation record");
    }
    if (name != RoleSet::name(r)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unexpected role '" + name + "'");
    }
    auto& rel = m.relations[r];
    rel.translation.resize(m.dim);
    rel.scale.resize(m.dim);
    std::string tok;
    for (int j = 0; j < 2 * m.dim; ++j) {
      if (!(ss >> tok)) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": relation record too short");
      }
      const double v = parse_text_double(tok, path, line_no);
      if (j < m.dim) {
        rel.translation[j] = v;
      } else {
        rel.scale[j - m.dim] = v;
      }
    }
  }
  return m;
}

}  // namespace

void save_model(const Model& m, const std::string& path, SaveMode mode) {
  write_file_atomic(path,
               mode == SaveMode::kBinary ? encode_binary(m) : encode_text(m));
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();
  if (data.size() >= sizeof(kMagic) &&
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0) {
    return decode_binary(data, path);
  }
  std::istringstream text(data);
  return decode_text(text, path);
}

}  // namespace defembed
