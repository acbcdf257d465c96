#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "posinduce/common.hpp"

namespace posinduce {

/// Versioned file format for models: a plain-text header listing metadata
/// and sections, followed by the section payloads.
///
///   POSINDUCE-CONTAINER<TAB>1
///   kind<TAB>bundle
///   meta<TAB>key<TAB>value
///   section<TAB>name<TAB>f64|i64|text<TAB>rows<TAB>cols<TAB>bytes
///   end
///   <payloads, in section order; numbers little-endian>
inline constexpr int kContainerVersion = 1;

class ContainerWriter {
 public:
  explicit ContainerWriter(std::string kind) : kind_(std::move(kind)) {}

  void meta(const std::string& key, const std::string& value);
  void add_matrix(const std::string& name, const RowMatrix& m);
  void add_vector(const std::string& name, const Eigen::VectorXd& v);
  void add_ints(const std::string& name, std::span<const std::int64_t> values);
  void add_ints(const std::string& name, std::span<const std::int32_t> values);
  void add_text(const std::string& name, std::string text);

  void write(std::ostream& out) const;
  void write_file(const std::filesystem::path& path) const;

 private:
  struct Section {
    std::string name;
    std::string type;
    std::int64_t rows;
    std::int64_t cols;
    std::string payload;
  };
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<Section> sections_;
};

class ContainerReader {
 public:
  /// Throws DataError when the header, version or kind does not match.
  static ContainerReader read(std::istream& in, const std::string& expected_kind,
                              const std::string& source);
  static ContainerReader read_file(const std::filesystem::path& path,
                                   const std::string& expected_kind);

  const std::string& meta(const std::string& key) const;
  bool has_meta(const std::string& key) const { return meta_.count(key) > 0; }
  bool has_section(const std::string& name) const {
    return sections_.count(name) > 0;
  }

  RowMatrix matrix(const std::string& name) const;
  Eigen::VectorXd vector(const std::string& name) const;
  std::vector<std::int64_t> ints(const std::string& name) const;
  std::vector<std::int32_t> ints32(const std::string& name) const;
  const std::string& text(const std::string& name) const;

 private:
  struct Section {
    std::string type;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::string payload;
  };
  const Section& section(const std::string& name, std::string_view type) const;

  std::string source_;
  std::map<std::string, std::string> meta_;
  std::map<std::string, Section> sections_;
};

}  // namespace posinduce
