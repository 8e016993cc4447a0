#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "planforge/catalog.hpp"
#include "planforge/error.hpp"
#include "planforge/fsio.hpp"
#include "planforge/query.hpp"
#include "planforge/rng.hpp"
#include "planforge/rsm.hpp"

namespace planforge {

// A complete, self-consistent problem: allocation matrix, statistics for
// every relation in it, and a query whose relations all appear in the
// matrix.
struct Instance {
  RelationSiteMatrix rsm;
  Catalog catalog;
  Query query;
};

inline Instance load_instance(const std::filesystem::path& rsm_path,
                              const std::filesystem::path& catalog_path,
                              const std::filesystem::path& query_path) {
  Instance inst;
  inst.rsm = load_rsm(read_text_file(rsm_path), rsm_path.string());
  inst.catalog =
      load_catalog(read_text_file(catalog_path), catalog_path.string());
  inst.query = parse_query(read_text_file(query_path), query_path.string());
  ensure_catalog_covers(inst.catalog, inst.rsm);
  for (const auto& r : inst.query.relations)
    if (!inst.rsm.has_relation(r))
      throw ValidationError("query relation " + r +
                            " does not appear in the allocation matrix");
  return inst;
}

struct GenerateSpec {
  int n_sites = 0;
  int n_relations = 0;
  int replication_degree = 0;
  std::uint64_t seed = 1;
};

// Random but fully reproducible instance:
//  - every relation is replicated on `replication_degree` distinct sites
//    chosen uniformly;
//  - tuple counts are log-uniform in [1e2, 1e5], selectivities uniform in
//    [0.1, 0.9];
//  - the query is a chain join over all relations;
//  - chain-join selectivities use the standard 1/max(|Ri|,|Rj|) estimate so
//    collective join load stays on the same scale as the other costs.
// Draw order: per relation its site set, then per relation the tuple-count
// and selectivity uniforms.
inline Instance generate_instance(const GenerateSpec& spec) {
  if (spec.n_sites < 1)
    throw ConfigError("instance needs at least one site");
  if (spec.n_relations < 1)
    throw ConfigError("instance needs at least one relation");
  if (spec.replication_degree < 1 || spec.replication_degree > spec.n_sites)
    throw ConfigError("replication degree must lie in [1, n_sites]");

  RngStream rng(spec.seed);
  Instance inst;

  std::vector<std::string> relations;
  for (int i = 1; i <= spec.n_relations; ++i)
    relations.push_back("R" + std::to_string(i));
  std::vector<SiteId> sites(spec.n_sites);
  std::iota(sites.begin(), sites.end(), 1);

  std::vector<std::vector<std::uint8_t>> cells(
      spec.n_sites, std::vector<std::uint8_t>(spec.n_relations, 0));
  std::vector<SiteId> pick(sites);
  for (int r = 0; r < spec.n_relations; ++r) {
    // partial Fisher-Yates: the first `degree` entries are the replica set
    for (int i = 0; i < spec.replication_degree; ++i) {
      const int j = rng.uniform_int(i, spec.n_sites - 1);
      std::swap(pick[i], pick[j]);
      cells[static_cast<std::size_t>(pick[i] - 1)][r] = 1;
    }
  }
  inst.rsm = RelationSiteMatrix::make(sites, relations, std::move(cells));

  for (int r = 0; r < spec.n_relations; ++r) {
    RelationStats st;
    const double u_count = rng.uniform();
    st.tuple_count = static_cast<std::uint64_t>(
        std::llround(std::pow(10.0, 2.0 + 3.0 * u_count)));
    st.selectivity = 0.1 + 0.8 * rng.uniform();
    inst.catalog.relation_stats[relations[r]] = st;
  }

  inst.query.projection = {"a"};
  inst.query.relations = relations;
  for (int r = 0; r + 1 < spec.n_relations; ++r) {
    const std::string key = "j" + std::to_string(r + 1);
    inst.query.join_predicates.push_back(
        {{relations[r], key}, {relations[r + 1], key}});
    const double na =
        static_cast<double>(inst.catalog.stats(relations[r]).tuple_count);
    const double nb =
        static_cast<double>(inst.catalog.stats(relations[r + 1]).tuple_count);
    const double sj = std::min(1.0, 1.0 / std::max(na, nb));
    inst.catalog.set_join_selectivity(relations[r], relations[r + 1], sj);
  }
  return inst;
}

// Writes rsm.csv, catalog.txt and query.sql; the files round-trip through
// load_instance.
inline void write_instance(const Instance& inst,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "rsm.csv", render_rsm(inst.rsm));
  write_text_file(dir / "catalog.txt", render_catalog(inst.catalog));
  write_text_file(dir / "query.sql", render_query(inst.query) + "\n");
}

}  // namespace planforge
