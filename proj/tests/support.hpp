#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "roledet/corpus.hpp"
#include "roledet/text.hpp"

namespace roledet::test {

/// Mention given as (entity, sentence, start, end, role).
struct M {
  std::string entity;
  std::size_t sent, start, end;
  Role role;
};

/// Document from whitespace-separated sentences; normalized = surface.
inline Document make_doc(const std::string& id, std::initializer_list<std::string> sentences,
                         std::initializer_list<M> mentions = {}) {
  Document d;
  d.id = id;
  for (const auto& s : sentences) {
    Sentence sent;
    for (const auto& w : split_whitespace(s)) sent.push_back({w, w});
    d.sentences.push_back(std::move(sent));
  }
  for (const auto& m : mentions) d.mentions.push_back({m.entity, {m.sent, m.start, m.end}, m.role, 0});
  finalize(d);
  return d;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("roledet_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace roledet::test
