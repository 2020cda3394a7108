#pragma once

// INI-style experiment configuration. Global keys live in [general]
// (seed, workers, out, corpus); each experiment reads its own section.

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "cuechaos/errors.hpp"

#ifndef CUECHAOS_DEFAULT_CORPUS
#define CUECHAOS_DEFAULT_CORPUS "data/symbols.txt"
#endif

namespace cuechaos {

/// Read-only view of one configuration section.
class ConfigSection {
 public:
  ConfigSection() = default;
  explicit ConfigSection(boost::property_tree::ptree tree) : tree_(std::move(tree)) {}

  /// Value of `key`, or `fallback` when absent. Unparsable values throw
  /// (the property-tree default overload would silently fall back).
  template <typename T>
  T get(const std::string& key, T fallback) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return fallback;
    return parse<T>(boost::trim_copy(*raw), key);
  }

  template <typename T>
  std::vector<T> get_list(const std::string& key, std::vector<T> fallback) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return fallback;
    std::vector<std::string> parts;
    boost::split(parts, *raw, boost::is_any_of(","));
    std::vector<T> out;
    for (auto& p : parts) {
      boost::trim(p);
      if (p.empty()) continue;
      out.push_back(parse<T>(p, key));
    }
    if (out.empty()) throw InvalidArgument("config: empty list for key '" + key + "'");
    return out;
  }

 private:
  template <typename T>
  static T parse(const std::string& text, const std::string& key) {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else {
      if constexpr (std::is_unsigned_v<T>)
        if (!text.empty() && text[0] == '-')
          throw InvalidArgument("config: negative value '" + text + "' for key '" + key + "'");
      try {
        return boost::lexical_cast<T>(text);
      } catch (const boost::bad_lexical_cast&) {
        throw InvalidArgument("config: bad value '" + text + "' for key '" + key + "'");
      }
    }
  }

  boost::property_tree::ptree tree_;
};

struct ExperimentConfig {
  std::uint64_t seed = 20240611;
  unsigned workers = 1;
  std::filesystem::path out_dir = "out";
  std::filesystem::path corpus = CUECHAOS_DEFAULT_CORPUS;
  boost::property_tree::ptree tree;

  ConfigSection section(const std::string& name) const {
    const auto child = tree.get_child_optional(name);
    return child ? ConfigSection(*child) : ConfigSection();
  }

  void validate() const {
    if (workers < 1) throw InvalidArgument("config: workers must be >= 1");
  }

  static ExperimentConfig from_tree(boost::property_tree::ptree tree) {
    ExperimentConfig c;
    c.tree = std::move(tree);
    const auto general = c.section("general");
    c.seed = general.get<std::uint64_t>("seed", c.seed);
    const long workers = general.get<long>("workers", 1);
    if (workers < 1) throw InvalidArgument("config: workers must be >= 1");
    c.workers = static_cast<unsigned>(workers);
    c.out_dir = general.get<std::string>("out", c.out_dir.string());
    c.corpus = general.get<std::string>("corpus", c.corpus.string());
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw InvalidArgument(std::string("config: ") + e.what());
    }
    auto c = from_tree(std::move(tree));
    if (c.corpus.is_relative() && !std::filesystem::exists(c.corpus)) {
      const auto beside = path.parent_path() / c.corpus;
      if (std::filesystem::exists(beside)) c.corpus = beside;
    }
    return c;
  }
};

}  // namespace cuechaos
