#include "posinduce/container.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace posinduce {
namespace {

constexpr std::string_view kMagic = "POSINDUCE-CONTAINER";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_u64(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i]))
         << (8 * i);
  }
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

}  // namespace

void ContainerWriter::meta(const std::string& key, const std::string& value) {
  if (key.find_first_of("\t\n") != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw UsageError("container metadata may not contain tabs or newlines");
  }
  meta_.emplace_back(key, value);
}

void ContainerWriter::add_matrix(const std::string& name, const RowMatrix& m) {
  std::string payload;
  payload.reserve(static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_u64(payload, std::bit_cast<std::uint64_t>(m(i, j)));
    }
  }
  sections_.push_back({name, "f64", m.rows(), m.cols(), std::move(payload)});
}

void ContainerWriter::add_vector(const std::string& name, const Eigen::VectorXd& v) {
  add_matrix(name, RowMatrix(v));
}

void ContainerWriter::add_ints(const std::string& name,
                               std::span<const std::int64_t> values) {
  std::string payload;
  payload.reserve(values.size() * 8);
  for (const auto v : values) put_u64(payload, static_cast<std::uint64_t>(v));
  sections_.push_back({name, "i64", static_cast<std::int64_t>(values.size()), 1,
                       std::move(payload)});
}

void ContainerWriter::add_ints(const std::string& name,
                               std::span<const std::int32_t> values) {
  const std::vector<std::int64_t> wide(values.begin(), values.end());
  add_ints(name, wide);
}

void ContainerWriter::add_text(const std::string& name, std::string text) {
  const auto size = static_cast<std::int64_t>(text.size());
  sections_.push_back({name, "text", size, 1, std::move(text)});
}

void ContainerWriter::write(std::ostream& out) const {
  out << kMagic << '\t' << kContainerVersion << '\n';
  out << "kind\t" << kind_ << '\n';
  for (const auto& [k, v] : meta_) out << "meta\t" << k << '\t' << v << '\n';
  for (const auto& s : sections_) {
    out << "section\t" << s.name << '\t' << s.type << '\t' << s.rows << '\t'
        << s.cols << '\t' << s.payload.size() << '\n';
  }
  out << "end\n";
  for (const auto& s : sections_) out.write(s.payload.data(), static_cast<std::streamsize>(s.payload.size()));
}

void ContainerWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  write(out);
  if (!out) throw DataError(path.string() + ": write failed");
}

ContainerReader ContainerReader::read(std::istream& in,
                                      const std::string& expected_kind,
                                      const std::string& source) {
  ContainerReader r;
  r.source_ = source;
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto magic = split_tabs(line);
  if (magic.size() != 2 || magic[0] != kMagic) {
    throw DataError(source + ": not a posinduce container (expected '" +
                    std::string(kMagic) + "' header)");
  }
  if (magic[1] != std::to_string(kContainerVersion)) {
    throw DataError(source + ": container format version " + magic[1] +
                    ", expected " + std::to_string(kContainerVersion));
  }
  if (!std::getline(in, line)) throw DataError(source + ": truncated header");
  const auto kind = split_tabs(line);
  if (kind.size() != 2 || kind[0] != "kind") {
    throw DataError(source + ": missing kind line");
  }
  if (kind[1] != expected_kind) {
    throw DataError(source + ": holds a '" + kind[1] + "', expected a '" +
                    expected_kind + "'");
  }

  std::vector<std::pair<std::string, std::size_t>> order;
  for (;;) {
    if (!std::getline(in, line)) throw DataError(source + ": truncated header");
    if (line == "end") break;
    const auto f = split_tabs(line);
    if (f[0] == "meta" && f.size() == 3) {
      r.meta_[f[1]] = f[2];
    } else if (f[0] == "section" && f.size() == 6) {
      Section s;
      s.type = f[2];
      try {
        s.rows = std::stoll(f[3]);
        s.cols = std::stoll(f[4]);
        order.emplace_back(f[1], static_cast<std::size_t>(std::stoull(f[5])));
      } catch (const std::logic_error&) {
        throw DataError(source + ": malformed section line '" + line + "'");
      }
      r.sections_[f[1]] = std::move(s);
    } else {
      throw DataError(source + ": malformed header line '" + line + "'");
    }
  }
  for (const auto& [name, bytes] : order) {
    std::string payload(bytes, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
      throw DataError(source + ": truncated payload for section '" + name + "'");
    }
    r.sections_[name].payload = std::move(payload);
  }
  return r;
}

ContainerReader ContainerReader::read_file(const std::filesystem::path& path,
                                           const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open");
  return read(in, expected_kind, path.string());
}

const std::string& ContainerReader::meta(const std::string& key) const {
  const auto it = meta_.find(key);
  if (it == meta_.end()) {
    throw DataError(source_ + ": missing metadata '" + key + "'");
  }
  return it->second;
}

const ContainerReader::Section& ContainerReader::section(
    const std::string& name, std::string_view type) const {
  const auto it = sections_.find(name);
  if (it == sections_.end()) {
    throw DataError(source_ + ": missing section '" + name + "'");
  }
  if (it->second.type != type) {
    throw DataError(source_ + ": section '" + name + "' has type " +
                    it->second.type + ", expected " + std::string(type));
  }
  const auto expected_bytes =
      type == "text" ? static_cast<std::size_t>(it->second.rows)
                     : static_cast<std::size_t>(it->second.rows * it->second.cols) * 8;
  if (it->second.payload.size() != expected_bytes) {
    throw DataError(source_ + ": section '" + name + "' has inconsistent size");
  }
  return it->second;
}

RowMatrix ContainerReader::matrix(const std::string& name) const {
  const Section& s = section(name, "f64");
  RowMatrix m(s.rows, s.cols);
  std::size_t offset = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = std::bit_cast<double>(get_u64(s.payload, offset));
      offset += 8;
    }
  }
  return m;
}

Eigen::VectorXd ContainerReader::vector(const std::string& name) const {
  const RowMatrix m = matrix(name);
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

std::vector<std::int64_t> ContainerReader::ints(const std::string& name) const {
  const Section& s = section(name, "i64");
  std::vector<std::int64_t> out(static_cast<std::size_t>(s.rows));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::int64_t>(get_u64(s.payload, i * 8));
  }
  return out;
}

std::vector<std::int32_t> ContainerReader::ints32(const std::string& name) const {
  const auto wide = ints(name);
  return {wide.begin(), wide.end()};
}

const std::string& ContainerReader::text(const std::string& name) const {
  return section(name, "text").payload;
}

}  // namespace posinduce
