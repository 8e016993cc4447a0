#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "planforge/error.hpp"
#include "planforge/rsm.hpp"

namespace planforge {

struct RelationStats {
  std::uint64_t tuple_count = 0;
  double selectivity = 0.0;  // fraction of tuples surviving local predicates

  bool operator==(const RelationStats& o) const {
    return tuple_count == o.tuple_count && selectivity == o.selectivity;
  }
};

// Statistics backing the cost model: per-relation cardinality/selectivity
// plus symmetric join selectivities with a default fallback.
struct Catalog {
  std::map<std::string, RelationStats> relation_stats;
  // key is the relation pair in lexicographic order
  std::map<std::pair<std::string, std::string>, double> join_selectivities;
  double default_join_selectivity = 0.01;

  const RelationStats& stats(const std::string& relation) const {
    auto it = relation_stats.find(relation);
    if (it == relation_stats.end())
      throw SemanticError("no statistics for relation " + relation);
    return it->second;
  }

  bool has_stats(const std::string& relation) const {
    return relation_stats.count(relation) != 0;
  }

  // Symmetric lookup; falls back to the default when the pair is absent.
  double join_selectivity(const std::string& a, const std::string& b) const {
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = join_selectivities.find(key);
    return it == join_selectivities.end() ? default_join_selectivity
                                          : it->second;
  }

  void set_join_selectivity(const std::string& a, const std::string& b,
                            double value) {
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    join_selectivities[key] = value;
  }

  bool operator==(const Catalog& o) const {
    return relation_stats == o.relation_stats &&
           join_selectivities == o.join_selectivities &&
           default_join_selectivity == o.default_join_selectivity;
  }
};

// Text format, line oriented:
//
//   [relations]
//   # name  tuple_count  selectivity
//   R1  1000  0.5
//
//   [joins]
//   default  0.01
//   R1,R4  0.02
//
// Blank lines and '#' comments are ignored. Parse and range errors cite the
// offending line number.
inline Catalog load_catalog(const std::string& text,
                            const std::string& source = "") {
  auto fail = [&](const std::string& msg, int line) {
    std::string where = source.empty() ? msg : source + ": " + msg;
    throw ParseError(where, line);
  };

  Catalog cat;
  bool default_seen = false;

  enum class Section { none, relations, joins };
  Section section = Section::none;
  bool relations_seen = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "[relations]") {
      section = Section::relations;
      relations_seen = true;
      continue;
    }
    if (tok[0] == "[joins]") {
      section = Section::joins;
      continue;
    }
    if (tok[0].front() == '[')
      fail("unknown section " + tok[0], line_no);

    if (section == Section::relations) {
      if (tok.size() != 3)
        fail("relation entry needs: name tuple_count selectivity", line_no);
      RelationStats st;
      try {
        std::size_t pos = 0;
        long long n = std::stoll(tok[1], &pos);
        if (pos != tok[1].size() || n < 0) throw std::invalid_argument("count");
        st.tuple_count = static_cast<std::uint64_t>(n);
      } catch (const std::exception&) {
        fail("tuple count '" + tok[1] + "' is not a nonnegative integer",
             line_no);
      }
      try {
        std::size_t pos = 0;
        st.selectivity = std::stod(tok[2], &pos);
        if (pos != tok[2].size()) throw std::invalid_argument("sel");
      } catch (const std::exception&) {
        fail("selectivity '" + tok[2] + "' is not a number", line_no);
      }
      if (!(st.selectivity >= 0.0 && st.selectivity <= 1.0))
        fail("selectivity of " + tok[0] + " must lie in [0,1], found " + tok[2],
             line_no);
      if (!cat.relation_stats.emplace(tok[0], st).second)
        fail("duplicate statistics for relation " + tok[0], line_no);
      continue;
    }

    if (section == Section::joins) {
      if (tok.size() != 2)
        fail("join entry needs: default <value> or A,B <value>", line_no);
      double value = 0.0;
      try {
        std::size_t pos = 0;
        value = std::stod(tok[1], &pos);
        if (pos != tok[1].size()) throw std::invalid_argument("sel");
      } catch (const std::exception&) {
        fail("join selectivity '" + tok[1] + "' is not a number", line_no);
      }
      if (!(value >= 0.0 && value <= 1.0))
        fail("join selectivity must lie in [0,1], found " + tok[1], line_no);
      if (tok[0] == "default") {
        if (default_seen) fail("duplicate default join selectivity", line_no);
        cat.default_join_selectivity = value;
        default_seen = true;
        continue;
      }
      std::size_t comma = tok[0].find(',');
      if (comma == std::string::npos || comma == 0 || comma + 1 == tok[0].size())
        fail("join pair must look like R1,R4", line_no);
      std::string a = tok[0].substr(0, comma);
      std::string b = tok[0].substr(comma + 1);
      if (a == b) fail("join pair must name two distinct relations", line_no);
      if (!cat.has_stats(a))
        fail("join entry references unknown relation " + a, line_no);
      if (!cat.has_stats(b))
        fail("join entry references unknown relation " + b, line_no);
      auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
      if (!cat.join_selectivities.emplace(key, value).second)
        fail("duplicate join selectivity for " + tok[0], line_no);
      continue;
    }

    fail("entry outside any section (expected [relations] or [joins])",
         line_no);
  }

  if (!relations_seen) {
    std::string msg = "catalog has no [relations] section";
    throw ValidationError(source.empty() ? msg : source + ": " + msg);
  }
  return cat;
}

inline std::string render_catalog(const Catalog& cat) {
  std::ostringstream out;
  out << "[relations]\n";
  out << "# name  tuple_count  selectivity\n";
  for (const auto& [name, st] : cat.relation_stats) {
    std::ostringstream sel;
    sel.precision(17);
    sel << st.selectivity;
    out << name << "  " << st.tuple_count << "  " << sel.str() << '\n';
  }
  out << "\n[joins]\n";
  {
    std::ostringstream d;
    d.precision(17);
    d << cat.default_join_selectivity;
    out << "default  " << d.str() << '\n';
  }
  for (const auto& [pair, value] : cat.join_selectivities) {
    std::ostringstream v;
    v.precision(17);
    v << value;
    out << pair.first << ',' << pair.second << "  " << v.str() << '\n';
  }
  return out.str();
}

// Every relation in the allocation matrix must have statistics, otherwise
// costs over its plans are undefined.
inline void ensure_catalog_covers(const Catalog& cat,
                                  const RelationSiteMatrix& rsm) {
  std::vector<std::string> missing;
  for (const auto& r : rsm.relations)
    if (!cat.has_stats(r)) missing.push_back(r);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size(); ++i) {
    if (i) list += ", ";
    list += missing[i];
  }
  throw ValidationError("catalog is missing statistics for: " + list);
}

}  // namespace planforge
