#pragma once

// Accuracy benchmark of the thresholded heuristic against the exact oracle.
//
// For every instance index a fresh evidence is drawn from a stream derived
// from (seed, index); the same evidence is then reused across the whole
// epsilon grid. The variables the heuristic manages to explain at a given
// epsilon form the query set handed to the exact solver.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/generate.hpp"
#include "margmap/heuristic.hpp"
#include "margmap/inference.hpp"
#include "margmap/model.hpp"
#include "margmap/oracle.hpp"
#include "margmap/random.hpp"
#include "margmap/uai.hpp"

namespace margmap {

struct BenchmarkSpec {
  std::string model_path;
  std::size_t k = 5;  // observed variables per instance
  std::size_t q = 100;  // instances per epsilon
  std::vector<double> epsilon_grid;
  std::uint64_t seed = 0;
  std::size_t oracle_cap = kDefaultOracleCap;
  std::size_t jobs = 1;
};

inline constexpr int kMaxEvidenceAttempts = 100;

struct InstanceResult {
  double epsilon = 0.0;
  std::size_t seed_index = 0;
  bool skipped = false;
  std::string skip_reason;
  std::vector<VariableId> explained_set;
  Assignment heuristic_assignment;
  Assignment exact_assignment;
  bool exact_match = false;
  double hamming_similarity = 1.0;
  double confidence = 1.0;
  double explained_fraction = 0.0;
  double p_tilde = 0.0;
  double p_star = 0.0;
  double t_mar = 0.0;
  double t_mmap = 0.0;
};

struct TrajectoryPoint {
  double epsilon = 0.0;
  double exact_match_rate = 0.0;
  double mean_hamming = 0.0;
  double mean_explained_fraction = 0.0;
  std::size_t instances = 0;  // instances averaged (q minus skipped)
  std::size_t skipped = 0;
};

struct BenchmarkResult {
  std::vector<TrajectoryPoint> points;
  // Ordered by epsilon index, then instance index.
  std::vector<InstanceResult> instances;
};

/// 21-point grid 0, 0.05, ..., 1.
inline std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

inline void validate(const BenchmarkSpec& spec, const GraphicalModel& m) {
  if (spec.k == 0 || spec.k >= m.num_variables()) {
    throw ContractError("k must satisfy 0 < k < " +
                        std::to_string(m.num_variables()));
  }
  if (spec.q == 0) throw ContractError("q must be positive");
  if (spec.epsilon_grid.empty()) throw ContractError("empty epsilon grid");
  for (std::size_t i = 0; i < spec.epsilon_grid.size(); ++i) {
    const double eps = spec.epsilon_grid[i];
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw ContractError("epsilon outside [0, 1]");
    }
    if (i > 0 && !(eps > spec.epsilon_grid[i - 1])) {
      throw ContractError("epsilon grid must be strictly increasing");
    }
  }
  if (spec.jobs == 0) throw ContractError("jobs must be positive");
}

/// Observes k distinct variables, each in a uniformly drawn state. The stream
/// is consumed variables first, then states. Draws with zero probability are
/// retried; std::nullopt after kMaxEvidenceAttempts failures.
inline std::optional<Evidence> generate_instance(const GraphicalModel& m,
                                                 std::size_t k, Rng& rng) {
  if (k == 0 || k >= m.num_variables()) {
    throw ContractError("k must satisfy 0 < k < n");
  }
  std::vector<VariableId> all(m.num_variables());
  for (VariableId v = 0; v < all.size(); ++v) all[v] = v;
  for (int attempt = 0; attempt < kMaxEvidenceAttempts; ++attempt) {
    Evidence e = random_evidence(m, all, k, rng);
    if (pr(m, e) > 0.0) return e;
  }
  return std::nullopt;
}

/// 1 - (differing variables) / (variable count); 1 for empty assignments.
inline double hamming_similarity(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) {
    throw ContractError("hamming similarity needs identical variable sets");
  }
  if (a.empty()) return 1.0;
  std::size_t differing = 0;
  auto j = b.begin();
  for (auto i = a.begin(); i != a.end(); ++i, ++j) {
    if (i->first != j->first) {
      throw ContractError("hamming similarity needs identical variable sets");
    }
    if (i->second != j->second) ++differing;
  }
  return 1.0 - static_cast<double>(differing) / static_cast<double>(a.size());
}

/// One heuristic-vs-oracle comparison at a fixed epsilon.
inline InstanceResult evaluate_instance(const GraphicalModel& m,
                                        const Evidence& e, double epsilon,
                                        std::size_t oracle_cap) {
  using Clock = std::chrono::steady_clock;
  InstanceResult r;
  r.epsilon = epsilon;
  const std::vector<VariableId> candidates = m.explainable(e);
  if (candidates.empty()) {
    r.exact_match = true;
    return r;
  }

  const ExplanationTrace trace = epsilon_mmap2mar(m, candidates, e, epsilon);
  r.heuristic_assignment = trace.explained;
  r.confidence = trace.confidence;
  r.p_tilde = trace.p_tilde;
  r.t_mar = trace.mar_seconds;
  for (const auto& [v, s] : trace.explained) r.explained_set.push_back(v);
  r.explained_fraction = static_cast<double>(r.explained_set.size()) /
                         static_cast<double>(candidates.size());

  const auto start = Clock::now();
  try {
    const MmapSolution exact = brute_force_mmap(m, e, r.explained_set, oracle_cap);
    r.exact_assignment = exact.assignment;
    r.p_star = exact.probability;
  } catch (const OracleTooLarge& err) {
    r.skipped = true;
    r.skip_reason = err.what();
    return r;
  }
  r.t_mmap = std::chrono::duration<double>(Clock::now() - start).count();

  r.exact_match = r.heuristic_assignment == r.exact_assignment;
  r.hamming_similarity = hamming_similarity(r.heuristic_assignment,
                                            r.exact_assignment);
  return r;
}

inline std::vector<TrajectoryPoint> aggregate(
    const std::vector<double>& grid, const std::vector<InstanceResult>& rows) {
  std::vector<TrajectoryPoint> points;
  for (double eps : grid) {
    TrajectoryPoint p;
    p.epsilon = eps;
    for (const InstanceResult& r : rows) {
      if (r.epsilon != eps) continue;
      if (r.skipped) {
        ++p.skipped;
        continue;
      }
      ++p.instances;
      p.exact_match_rate += r.exact_match ? 1.0 : 0.0;
      p.mean_hamming += r.hamming_similarity;
      p.mean_explained_fraction += r.explained_fraction;
    }
    const double count = static_cast<double>(p.instances);
    if (p.instances == 0) {
      p.exact_match_rate = p.mean_hamming = p.mean_explained_fraction =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      p.exact_match_rate /= count;
      p.mean_hamming /= count;
      p.mean_explained_fraction /= count;
    }
    points.push_back(p);
  }
  return points;
}

inline BenchmarkResult run_benchmark(const GraphicalModel& m,
                                     const BenchmarkSpec& spec) {
  validate(spec, m);
  const std::size_t grid = spec.epsilon_grid.size();
  std::vector<InstanceResult> rows(grid * spec.q);

  // Instance i fills rows[g * q + i] for every grid index g, so workers never
  // touch the same slot and the output order is fixed.
  auto run_instance = [&](std::size_t i) {
    Rng rng = Rng::for_instance(spec.seed, i);
    const std::optional<Evidence> e = generate_instance(m, spec.k, rng);
    for (std::size_t g = 0; g < grid; ++g) {
      InstanceResult r;
      if (e) {
        r = evaluate_instance(m, *e, spec.epsilon_grid[g], spec.oracle_cap);
      } else {
        r.epsilon = spec.epsilon_grid[g];
        r.skipped = true;
        r.skip_reason = "no evidence with positive probability after " +
                        std::to_string(kMaxEvidenceAttempts) + " draws";
      }
      r.seed_index = i;
      rows[g * spec.q + i] = std::move(r);
    }
  };

  if (spec.jobs == 1) {
    for (std::size_t i = 0; i < spec.q; ++i) run_instance(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < spec.jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next++) < spec.q;) {
          try {
            run_instance(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  return {aggregate(spec.epsilon_grid, rows), std::move(rows)};
}

inline BenchmarkResult run_benchmark(const BenchmarkSpec& spec) {
  return run_benchmark(load_uai(spec.model_path), spec);
}

// ---------------------------------------------------------------------------
// Output files

inline constexpr const char* kCsvHeader =
    "epsilon,seed_index,exact_match,hamming,confidence,explained_fraction,"
    "t_mar_s,t_mmap_s";

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("error while writing " + path);
}

}  // namespace detail

/// Writes "epsilon rate" lines for exact match and for Hamming similarity.
inline void emit_dat(const std::vector<TrajectoryPoint>& points,
                     const std::string& match_path,
                     const std::string& hamming_path) {
  auto match = detail::open_output(match_path);
  auto hamming = detail::open_output(hamming_path);
  for (const TrajectoryPoint& p : points) {
    match << detail::format_real(p.epsilon) << ' '
          << detail::format_real(p.exact_match_rate) << '\n';
    hamming << detail::format_real(p.epsilon) << ' '
            << detail::format_real(p.mean_hamming) << '\n';
  }
  detail::finish_output(match, match_path);
  detail::finish_output(hamming, hamming_path);
}

/// Per-instance CSV. Skipped instances appear as '#' comment lines.
inline std::string format_csv(const std::vector<InstanceResult>& rows,
                              std::uint64_t seed) {
  std::ostringstream out;
  out << "# master_seed=" << seed << '\n' << kCsvHeader << '\n';
  for (const InstanceResult& r : rows) {
    if (r.skipped) {
      out << "# skipped epsilon=" << detail::format_real(r.epsilon)
          << " seed_index=" << r.seed_index << ": " << r.skip_reason << '\n';
      continue;
    }
    out << detail::format_real(r.epsilon) << ',' << r.seed_index << ','
        << (r.exact_match ? 1 : 0) << ','
        << detail::format_real(r.hamming_similarity) << ','
        << detail::format_real(r.confidence) << ','
        << detail::format_real(r.explained_fraction) << ','
        << detail::format_real(r.t_mar) << ','
        << detail::format_real(r.t_mmap) << '\n';
  }
  return out.str();
}

inline void emit_csv(const std::vector<InstanceResult>& rows,
                     std::uint64_t seed, const std::string& path) {
  auto out = detail::open_output(path);
  out << format_csv(rows, seed);
  detail::finish_output(out, path);
}

/// Reads back a two-column data file written by emit_dat.
inline std::vector<std::pair<double, double>> read_dat(const std::string& path) {
  const std::string text = detail::read_file(path);
  std::vector<std::pair<double, double>> rows;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError("expected two columns", line_no, 1);
    }
    auto to_real = [&](const std::string& s, std::size_t token) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("not a number: '" + s + "'", line_no, token);
      }
      return v;
    };
    rows.emplace_back(to_real(a, 1), to_real(b, 2));
  }
  return rows;
}

/// Rebuilds (epsilon, exact match, Hamming) points from a pair of data files.
inline std::vector<TrajectoryPoint> read_trajectory(
    const std::string& match_path, const std::string& hamming_path) {
  const auto match = read_dat(match_path);
  const auto hamming = read_dat(hamming_path);
  if (match.size() != hamming.size()) {
    throw Error("trajectory files have different lengths");
  }
  std::vector<TrajectoryPoint> points;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (match[i].first != hamming[i].first) {
      throw Error("trajectory files disagree on epsilon at row " +
                  std::to_string(i + 1));
    }
    TrajectoryPoint p;
    p.epsilon = match[i].first;
    p.exact_match_rate = match[i].second;
    p.mean_hamming = hamming[i].second;
    points.push_back(p);
  }
  return points;
}

}  // namespace margmap
