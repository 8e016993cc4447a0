#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "planforge/error.hpp"

namespace planforge {

using SiteId = int;

// Boolean allocation matrix: which sites hold a replica of which relations.
// Row order and column order follow the source document; lookups go through
// the index maps so site ids need not be dense or sorted.
struct RelationSiteMatrix {
  std::vector<SiteId> sites;                // row order
  std::vector<std::string> relations;       // column order
  std::vector<std::vector<std::uint8_t>> cells;  // cells[row][col] in {0,1}

  std::map<SiteId, std::size_t> site_row;
  std::map<std::string, std::size_t> relation_col;

  std::size_t site_count() const { return sites.size(); }
  std::size_t relation_count() const { return relations.size(); }

  bool has_site(SiteId site) const { return site_row.count(site) != 0; }
  bool has_relation(const std::string& relation) const {
    return relation_col.count(relation) != 0;
  }

  // True when `site` stores a replica of `relation`; unknown site or
  // relation reads as "not stored".
  bool stores(SiteId site, const std::string& relation) const {
    auto r = site_row.find(site);
    auto c = relation_col.find(relation);
    if (r == site_row.end() || c == relation_col.end()) return false;
    return cells[r->second][c->second] != 0;
  }

  bool operator==(const RelationSiteMatrix& other) const {
    return sites == other.sites && relations == other.relations &&
           cells == other.cells;
  }

  // Validating constructor: rejects empty axes, non-positive or duplicate
  // site ids, duplicate relation names, ragged rows, and relations stored
  // nowhere. All loaders and generators funnel through here.
  static RelationSiteMatrix make(std::vector<SiteId> sites,
                                 std::vector<std::string> relations,
                                 std::vector<std::vector<std::uint8_t>> cells) {
    RelationSiteMatrix m;
    m.sites = std::move(sites);
    m.relations = std::move(relations);
    m.cells = std::move(cells);
    if (m.relations.empty())
      throw ValidationError("allocation matrix has no relations");
    if (m.sites.empty())
      throw ValidationError("allocation matrix has no sites");
    if (m.cells.size() != m.sites.size())
      throw ValidationError("allocation matrix row count does not match site count");
    for (std::size_t r = 0; r < m.sites.size(); ++r) {
      if (m.sites[r] <= 0)
        throw ValidationError("site id " + std::to_string(m.sites[r]) +
                              " is not a positive integer");
      if (!m.site_row.emplace(m.sites[r], r).second)
        throw ValidationError("duplicate site id " + std::to_string(m.sites[r]));
      if (m.cells[r].size() != m.relations.size())
        throw ValidationError("allocation matrix row for site " +
                              std::to_string(m.sites[r]) + " has " +
                              std::to_string(m.cells[r].size()) +
                              " cells, expected " +
                              std::to_string(m.relations.size()));
    }
    for (std::size_t c = 0; c < m.relations.size(); ++c) {
      if (m.relations[c].empty())
        throw ValidationError("empty relation name in allocation matrix header");
      if (!m.relation_col.emplace(m.relations[c], c).second)
        throw ValidationError("duplicate relation name " + m.relations[c]);
    }
    for (std::size_t c = 0; c < m.relations.size(); ++c) {
      bool stored = false;
      for (std::size_t r = 0; r < m.sites.size(); ++r)
        stored = stored || m.cells[r][c] != 0;
      if (!stored)
        throw ValidationError("relation " + m.relations[c] +
                              " is stored on no site");
    }
    return m;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding blanks; cell content itself stays strict
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string()
                                            : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

// Parses the CSV form: header "site,R1,...,Rn", one row per site with
// strict 0/1 cells. `source` names the input in error messages.
inline RelationSiteMatrix load_rsm(const std::string& text,
                                   const std::string& source = "") {
  auto fail = [&](const std::string& msg, int line, int col = 0) {
    std::string where = source.empty() ? msg : source + ": " + msg;
    throw ParseError(where, line, col);
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  std::vector<std::string> relations;
  bool header_seen = false;
  std::vector<SiteId> sites;
  std::vector<std::vector<std::uint8_t>> cells;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    auto fields = detail::split_csv_line(line);
    if (!header_seen) {
      if (fields.empty() || fields[0] != "site")
        fail("allocation matrix header must start with 'site'", line_no, 1);
      relations.assign(fields.begin() + 1, fields.end());
      header_seen = true;
      continue;
    }

    if (fields.size() != relations.size() + 1)
      fail("expected " + std::to_string(relations.size() + 1) +
               " fields, found " + std::to_string(fields.size()),
           line_no);

    SiteId site = 0;
    try {
      std::size_t pos = 0;
      site = std::stoi(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("site id '" + fields[0] + "' is not an integer", line_no, 1);
    }

    std::vector<std::uint8_t> row(relations.size());
    for (std::size_t c = 0; c < relations.size(); ++c) {
      const std::string& cell = fields[c + 1];
      if (cell == "0")
        row[c] = 0;
      else if (cell == "1")
        row[c] = 1;
      else
        fail("cell for relation " +
                 (c < relations.size() ? relations[c] : std::string("?")) +
                 " must be 0 or 1, found '" + cell + "'",
             line_no, static_cast<int>(c + 2));
    }
    sites.push_back(site);
    cells.push_back(std::move(row));
  }

  if (!header_seen) fail("allocation matrix is empty", line_no == 0 ? 1 : line_no);
  try {
    return RelationSiteMatrix::make(std::move(sites), std::move(relations),
                                    std::move(cells));
  } catch (const ValidationError& e) {
    if (source.empty()) throw;
    throw ValidationError(source + ": " + e.what());
  }
}

inline std::string render_rsm(const RelationSiteMatrix& m) {
  std::ostringstream out;
  out << "site";
  for (const auto& r : m.relations) out << ',' << r;
  out << '\n';
  for (std::size_t i = 0; i < m.sites.size(); ++i) {
    out << m.sites[i];
    for (std::size_t c = 0; c < m.relations.size(); ++c)
      out << ',' << (m.cells[i][c] ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

// All sites holding a replica of `relation`, ascending by site id.
// Nonempty for any matrix that passed validation.
inline std::vector<SiteId> sites_holding(const RelationSiteMatrix& m,
                                         const std::string& relation) {
  auto c = m.relation_col.find(relation);
  if (c == m.relation_col.end())
    throw SemanticError("unknown relation " + relation);
  std::vector<SiteId> out;
  for (std::size_t r = 0; r < m.sites.size(); ++r)
    if (m.cells[r][c->second]) out.push_back(m.sites[r]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace planforge
