#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "roledet/embeddings.hpp"
#include "roledet/errors.hpp"
#include "roledet/text.hpp"

namespace roledet {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'E', 'M', 'B', 'E', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw InputError("truncated model file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void put_matrix(std::ostream& out, const RowMatrixf& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) put_le(out, std::bit_cast<std::uint32_t>(m.data()[i]));
}

void get_matrix(std::istream& in, RowMatrixf& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<float>(get_le<std::uint32_t>(in));
}

bool parse_float(const std::string& s, float& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

/// Streams "token v1 ... vD" rows, with an optional "V D" header line.
/// Calls row(token, values) for each data row.
template <typename Fn>
std::size_t scan_text_vectors(std::istream& in, const std::string& source, std::size_t expected_dim, Fn row) {
  std::string line;
  std::size_t line_no = 0, dim = expected_dim;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
      const auto header_dim = static_cast<std::size_t>(std::stoull(fields[1]));
      if (dim != 0 && header_dim != dim)
        throw InputError(source + ": dimension mismatch: file has " + std::to_string(header_dim) +
                         ", model has " + std::to_string(dim));
      dim = header_dim;
      continue;
    }
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      if (line_no <= 2 && expected_dim != 0)
        throw InputError(source + ": dimension mismatch: file has " + std::to_string(fields.size() - 1) +
                         ", model has " + std::to_string(dim));
      throw ParseError(source, line_no, "expected " + std::to_string(dim) + " values, got " +
                                            std::to_string(fields.size() - 1));
    }
    values.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
      if (!parse_float(fields[j + 1], values[j]) || !std::isfinite(values[j]))
        throw ParseError(source, line_no, "bad vector component '" + fields[j + 1] + "'");
    row(fields[0], values);
  }
  return dim;
}

}  // namespace

std::size_t init_pretrained(EmbeddingModel& model, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pretrained vectors " + path.string());
  std::vector<char> seen(model.size(), 0);
  std::size_t covered = 0;
  scan_text_vectors(in, path.string(), model.dim(), [&](const std::string& tok, const std::vector<float>& v) {
    auto i = model.vocab.find(tok);
    if (!i) return;
    model.input.row(static_cast<Eigen::Index>(*i)) =
        Eigen::Map<const Eigen::RowVectorXf>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (!seen[*i]) {
      seen[*i] = 1;
      ++covered;
    }
  });
  return covered;
}

void write_binary(const EmbeddingModel& model, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, model.size());
  put_le<std::uint64_t>(out, model.dim());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& tok = model.vocab.token(i);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
    put_le<std::uint64_t>(out, model.vocab.count(i));
    put_le<std::uint8_t>(out, model.vocab.is_special(i) ? 1 : 0);
  }
  put_matrix(out, model.input);
  put_matrix(out, model.output);
}

EmbeddingModel read_binary(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InputError("not a binary embedding model");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion)
    throw InputError("unsupported model version " + std::to_string(version) + " (expected " +
                     std::to_string(kVersion) + ")");
  const auto v = get_le<std::uint64_t>(in);
  const auto d = get_le<std::uint64_t>(in);
  EmbeddingModel model;
  for (std::uint64_t i = 0; i < v; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string tok(len, '\0');
    if (!in.read(tok.data(), len)) throw InputError("truncated model file");
    const auto count = get_le<std::uint64_t>(in);
    const auto special = get_le<std::uint8_t>(in);
    model.vocab.add(tok, count, special != 0);
  }
  model.input.resize(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(d));
  model.output.resize(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(d));
  get_matrix(in, model.input);
  get_matrix(in, model.output);
  return model;
}

void write_text(const EmbeddingModel& model, std::ostream& out) {
  out << model.size() << ' ' << model.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.vocab.token(i);
    for (Eigen::Index j = 0; j < model.input.cols(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), model.input(static_cast<Eigen::Index>(i), j));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

EmbeddingModel read_text(std::istream& in, const std::string& source) {
  std::vector<std::string> tokens;
  std::vector<float> data;
  const std::size_t dim = scan_text_vectors(in, source, 0, [&](const std::string& tok, const std::vector<float>& v) {
    tokens.push_back(tok);
    data.insert(data.end(), v.begin(), v.end());
  });
  EmbeddingModel model;
  for (const auto& t : tokens) {
    if (model.vocab.contains(t)) throw InputError(source + ": duplicate token '" + t + "'");
    model.vocab.add(t, 0);
  }
  const auto v = static_cast<Eigen::Index>(tokens.size());
  const auto d = static_cast<Eigen::Index>(dim);
  model.input = Eigen::Map<const RowMatrixf>(data.data(), v, d);
  model.output = RowMatrixf::Zero(v, d);
  return model;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path, VectorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  if (format == VectorFormat::binary)
    write_binary(model, out);
  else
    write_text(model, out);
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model " + path.string());
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) return read_binary(in);
  return read_text(in, path.string());
}

}  // namespace roledet
