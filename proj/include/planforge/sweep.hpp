#pragma once

#include <atomic>
#include <cstdint>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "planforge/error.hpp"
#include "planforge/ga.hpp"
#include "planforge/instance.hpp"
#include "planforge/oracle.hpp"
#include "planforge/tlbo.hpp"

namespace planforge {

// Experiment grid: every (algorithm, instance, K, qc, seed) cell is one
// optimizer run terminated by reaching K distinct plans at or below qc, or
// by the iteration budget.
struct SweepSpec {
  std::vector<std::string> algorithms;  // subset of tlbo | agga | vega
  std::vector<GenerateSpec> instances;
  std::vector<int> k_values;
  std::vector<double> qc_thresholds;
  std::vector<std::uint64_t> seeds;

  int population_size = 20;
  int max_iterations = 100;
  double crossover_probability = 0.8;
  double mutation_probability = 0.2;
  Weights weights;
  TlboMode tlbo_mode = TlboMode::discrete;

  nlohmann::json overrides;  // per-algorithm key -> partial config
};

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  try {
    for (const auto& a : j.at("algorithms"))
      spec.algorithms.push_back(a.get<std::string>());
    for (const auto& inst : j.at("instances")) {
      GenerateSpec g;
      g.n_sites = inst.at("n_sites").get<int>();
      g.n_relations = inst.at("n_relations").get<int>();
      g.replication_degree = inst.at("degree").get<int>();
      g.seed = inst.value("seed", 1ULL);
      spec.instances.push_back(g);
    }
    for (const auto& k : j.at("k_values")) spec.k_values.push_back(k.get<int>());
    for (const auto& qc : j.at("qc_thresholds"))
      spec.qc_thresholds.push_back(qc.get<double>());
    for (const auto& s : j.at("seeds"))
      spec.seeds.push_back(s.get<std::uint64_t>());

    spec.population_size = j.value("population_size", 20);
    spec.max_iterations = j.value("max_iterations", 100);
    spec.crossover_probability = j.value("crossover_probability", 0.8);
    spec.mutation_probability = j.value("mutation_probability", 0.2);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      spec.weights = Weights::make(w.at(0).get<double>(),
                                   w.at(1).get<double>(),
                                   w.at(2).get<double>());
    }
    if (j.contains("tlbo_mode")) {
      const std::string mode = j.at("tlbo_mode").get<std::string>();
      if (mode == "faithful")
        spec.tlbo_mode = TlboMode::faithful;
      else if (mode == "discrete")
        spec.tlbo_mode = TlboMode::discrete;
      else
        throw ValidationError("tlbo_mode must be faithful or discrete");
    }
    if (j.contains("overrides")) spec.overrides = j.at("overrides");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep spec: ") + e.what());
  }

  if (spec.algorithms.empty())
    throw ValidationError("sweep spec lists no algorithms");
  for (const auto& a : spec.algorithms)
    if (a != "tlbo" && a != "agga" && a != "vega")
      throw ValidationError("unknown algorithm in sweep spec: " + a);
  if (spec.instances.empty())
    throw ValidationError("sweep spec lists no instances");
  if (spec.k_values.empty()) throw ValidationError("sweep spec lists no K values");
  if (spec.qc_thresholds.empty())
    throw ValidationError("sweep spec lists no qc thresholds");
  for (double qc : spec.qc_thresholds)
    if (qc <= 0.0)
      throw ValidationError("qc thresholds must be positive");
  if (spec.seeds.empty()) throw ValidationError("sweep spec lists no seeds");
  return spec;
}

inline SweepSpec load_sweep_spec(const std::string& text,
                                 const std::string& source = "") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((source.empty() ? std::string() : source + ": ") +
                     "sweep spec is not valid JSON: " + e.what());
  }
  try {
    return sweep_spec_from_json(j);
  } catch (const ValidationError& e) {
    if (source.empty()) throw;
    throw ValidationError(source + ": " + e.what());
  }
}

struct SweepRow {
  std::string algo;
  std::string mode;
  int n_sites = 0;
  int n_relations = 0;
  int k = 0;
  double qc = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> iterations_to_topk;
  double best_fitness = 0.0;
  std::uint64_t evals = 0;
};

namespace detail {

struct SweepCell {
  std::size_t algo_idx, instance_idx, k_idx, qc_idx, seed_idx;
};

inline void apply_overrides(const nlohmann::json& overrides,
                            const std::string& algo, int& population_size,
                            int& max_iterations, double& pc, double& pm,
                            Weights& weights, TlboMode& mode) {
  if (!overrides.is_object() || !overrides.contains(algo)) return;
  const auto& o = overrides.at(algo);
  try {
    population_size = o.value("population_size", population_size);
    max_iterations = o.value("max_iterations", max_iterations);
    pc = o.value("crossover_probability", pc);
    pm = o.value("mutation_probability", pm);
    if (o.contains("weights")) {
      const auto& w = o.at("weights");
      weights = Weights::make(w.at(0).get<double>(), w.at(1).get<double>(),
                              w.at(2).get<double>());
    }
    if (o.contains("mode")) {
      const std::string m = o.at("mode").get<std::string>();
      if (m == "faithful")
        mode = TlboMode::faithful;
      else if (m == "discrete")
        mode = TlboMode::discrete;
      else
        throw ValidationError("override mode must be faithful or discrete");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("sweep overrides for " + algo + ": " + e.what());
  }
}

inline SweepRow run_sweep_cell(const SweepSpec& spec, const SweepCell& cell,
                               const Instance& instance) {
  const std::string& algo = spec.algorithms[cell.algo_idx];
  const GenerateSpec& dims = spec.instances[cell.instance_idx];

  int population_size = spec.population_size;
  int max_iterations = spec.max_iterations;
  double pc = spec.crossover_probability;
  double pm = spec.mutation_probability;
  Weights weights = spec.weights;
  TlboMode mode = spec.tlbo_mode;
  apply_overrides(spec.overrides, algo, population_size, max_iterations, pc,
                  pm, weights, mode);

  Termination term;
  term.max_iterations = max_iterations;
  term.top_k = spec.k_values[cell.k_idx];
  term.qc_threshold = spec.qc_thresholds[cell.qc_idx];

  OptimizationReport report;
  if (algo == "tlbo") {
    TlboConfig config;
    config.population_size = population_size;
    config.mode = mode;
    config.seed = spec.seeds[cell.seed_idx];
    config.termination = term;
    report = run_tlbo(instance.rsm, instance.catalog, instance.query, config);
  } else {
    GaConfig config;
    config.population_size = population_size;
    config.crossover_probability = pc;
    config.mutation_probability = pm;
    config.weights = weights;
    config.seed = spec.seeds[cell.seed_idx];
    config.termination = term;
    report = algo == "agga"
                 ? run_ga_aggregation(instance.rsm, instance.catalog,
                                      instance.query, config)
                 : run_vega(instance.rsm, instance.catalog, instance.query,
                            config);
  }

  SweepRow row;
  row.algo = algo;
  row.mode = report.mode;
  row.n_sites = dims.n_sites;
  row.n_relations = dims.n_relations;
  row.k = term.top_k;
  row.qc = term.qc_threshold;
  row.seed = spec.seeds[cell.seed_idx];
  row.iterations_to_topk = report.iterations_to_topk;
  row.best_fitness = report.best_sphere();
  row.evals = report.evaluations;
  return row;
}

}  // namespace detail

// Runs the full cartesian grid. Rows come back in canonical order
// (algorithm, instance, K, qc, seed) regardless of `threads`; each cell is
// an independent seeded run, so concurrency cannot change any result.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 0) {
  std::vector<Instance> instances;
  instances.reserve(spec.instances.size());
  for (const auto& dims : spec.instances)
    instances.push_back(generate_instance(dims));

  std::vector<detail::SweepCell> cells;
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
    for (std::size_t i = 0; i < spec.instances.size(); ++i)
      for (std::size_t k = 0; k < spec.k_values.size(); ++k)
        for (std::size_t q = 0; q < spec.qc_thresholds.size(); ++q)
          for (std::size_t s = 0; s < spec.seeds.size(); ++s)
            cells.push_back({a, i, k, q, s});

  std::vector<SweepRow> rows(cells.size());
  if (threads <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      rows[c] = detail::run_sweep_cell(spec, cells[c],
                                       instances[cells[c].instance_idx]);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      try {
        rows[c] = detail::run_sweep_cell(spec, cells[c],
                                         instances[cells[c].instance_idx]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(threads, static_cast<int>(cells.size()));
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

inline constexpr const char* kSweepCsvHeader =
    "algo,mode,N_s,N_r,K,qc,seed,iterations_to_topk,best_fitness,evals";

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.algo << ',' << r.mode << ',' << r.n_sites << ',' << r.n_relations
        << ',' << r.k << ',' << detail::format_double(r.qc) << ',' << r.seed
        << ',';
    if (r.iterations_to_topk) out << *r.iterations_to_topk;
    out << ',' << detail::format_double(r.best_fitness) << ',' << r.evals
        << '\n';
  }
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sweep CSV is empty", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader)
    throw ParseError("unexpected sweep CSV header: " + line, 1);

  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    SweepRow row;
    try {
      std::getline(fields, row.algo, ',');
      std::getline(fields, row.mode, ',');
      std::getline(fields, field, ',');
      row.n_sites = std::stoi(field);
      std::getline(fields, field, ',');
      row.n_relations = std::stoi(field);
      std::getline(fields, field, ',');
      row.k = std::stoi(field);
      std::getline(fields, field, ',');
      row.qc = std::stod(field);
      std::getline(fields, field, ',');
      row.seed = std::stoull(field);
      std::getline(fields, field, ',');
      if (!field.empty()) row.iterations_to_topk = std::stoi(field);
      std::getline(fields, field, ',');
      row.best_fitness = std::stod(field);
      std::getline(fields, field, ',');
      row.evals = std::stoull(field);
    } catch (const std::exception&) {
      throw ParseError("malformed sweep CSV row: " + line, line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace planforge
