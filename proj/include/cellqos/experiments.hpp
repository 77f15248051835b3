#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cellqos/capacity.hpp"
#include "cellqos/qos.hpp"

namespace cellqos {

enum class Experiment { Factors, Blocking, Oracle };
enum class ModelKind { Hex, Poisson };

/// Everything one sweep needs. Defaults reproduce the reference setup:
/// delta = 1 km, K = 8667 /km, 5 MHz OFDMA, 52 dBm, eps = 0.12,
/// alpha = 0, -103 dBm noise, 180 kbit/s.
struct ExperimentConfig {
  Experiment experiment = Experiment::Factors;
  ModelKind model = ModelKind::Hex;
  std::vector<int> grid_orders;
  bool grid_orders_explicit = false;  // otherwise follows `model`
  double delta_km = 1.0;
  double k_per_km = 8667.0;
  std::vector<double> betas;
  std::vector<double> v_dbs;
  HandoverPolicy policy = HandoverPolicy::SmallestPathLoss;
  Technology tech = Technology::Ofdma;
  RadioParams radio{};
  ServiceClass service{};
  std::vector<double> traffic;  // Erlang per km^2
  std::size_t n_samples = 100000;
  std::size_t locations = 0;  // 0 means 30 * grid_order^2
  std::size_t realizations = 4;
  int capacity_units = 1000;
  std::uint64_t seed = 1;
  std::string out;  // empty means stdout
  unsigned threads = 1;
};

/// Config with the sweep grid of the given experiment filled in.
ExperimentConfig default_config(Experiment experiment, ModelKind model = ModelKind::Hex);

/// Applies one `key = value` setting. Lists are comma separated; `start:step:stop`
/// expands to an inclusive range. Throws Error on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads `key = value` lines; `#` starts a comment.
void load_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Throws Error if any list is empty or a parameter is out of range.
void validate(const ExperimentConfig& config);

std::string_view factors_csv_header();
std::string_view blocking_csv_header();
std::string_view oracle_csv_header();

/// Serialized CSV sink. Rows are flushed one at a time; when writing to a
/// file, the key of every written row is appended to "<out>.done" so an
/// interrupted sweep can resume by skipping completed cells.
class SweepWriter {
 public:
  /// Writes to `stream` (no done index).
  SweepWriter(std::ostream& stream, std::string_view header);
  /// Writes to `path`. With `resume`, an existing file whose header matches
  /// is extended and cells listed in the done index are skipped.
  SweepWriter(const std::filesystem::path& path, std::string_view header, bool resume);
  ~SweepWriter();

  SweepWriter(const SweepWriter&) = delete;
  SweepWriter& operator=(const SweepWriter&) = delete;

  bool done(const std::string& key) const { return done_.contains(key); }
  void write_row(const std::string& key, const std::string& row);

 private:
  std::unique_ptr<std::ostream> owned_;
  std::unique_ptr<std::ostream> index_;
  std::ostream* out_;
  std::set<std::string> done_;
};

/// One row per (grid_order, beta, v).
void run_factors(const ExperimentConfig& config, SweepWriter& writer, std::ostream& progress);
/// One row per (grid_order, beta, v, traffic).
void run_blocking(const ExperimentConfig& config, SweepWriter& writer, std::ostream& progress);
/// One row per (beta, v).
void run_oracle(const ExperimentConfig& config, SweepWriter& writer, std::ostream& progress);

/// Runs the experiment named in the config, writing to config.out or `stdout_stream`.
void run_experiment(const ExperimentConfig& config, bool resume, std::ostream& stdout_stream,
                    std::ostream& progress);

}  // namespace cellqos
