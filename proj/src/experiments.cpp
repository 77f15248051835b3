#include "cellqos/experiments.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "cellqos/error.hpp"
#include "cellqos/oracle.hpp"

namespace cellqos {

namespace {

std::vector<int> default_grid_orders(Experiment e, ModelKind m) {
  if (e == Experiment::Blocking) return {6};
  if (m == ModelKind::Poisson) return {6, 10, 30, 100};
  return {6, 10, 30};
}

std::vector<double> range(double start, double step, double stop) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw Error(fmt::format("{}: cannot parse '{}'", key, text));
  return value;
}

std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (const auto c1 = item.find(':'); c1 != std::string_view::npos) {
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string_view::npos) throw Error(fmt::format("{}: range '{}' needs start:step:stop", key, item));
      const auto start = parse_number<double>(key, item.substr(0, c1));
      const auto step = parse_number<double>(key, item.substr(c1 + 1, c2 - c1 - 1));
      const auto stop = parse_number<double>(key, item.substr(c2 + 1));
      if (!(step > 0.0)) throw Error(fmt::format("{}: range step must be positive", key));
      for (double v : range(start, step, stop)) out.push_back(v);
    } else if (!item.empty()) {
      out.push_back(parse_number<double>(key, item));
    }
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

const char* model_name(ModelKind m) { return m == ModelKind::Hex ? "hex" : "poisson"; }
const char* policy_name(HandoverPolicy p) {
  return p == HandoverPolicy::SmallestPathLoss ? "smallest_path_loss" : "closest";
}
const char* tech_name(Technology t) { return t == Technology::Ofdma ? "ofdma" : "cdma"; }

LayoutModel make_model(const ExperimentConfig& c, int grid_order) {
  TorusSpec torus(grid_order, c.delta_km);
  if (c.model == ModelKind::Hex) return HexModel{torus};
  return PoissonModel{torus, hex_intensity(c.delta_km)};
}

ShadowingModel make_shadowing(double v) {
  return v == 0.0 ? ShadowingModel::none() : ShadowingModel::log_normal(v);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentConfig default_config(Experiment experiment, ModelKind model) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.model = model;
  c.grid_orders = default_grid_orders(experiment, model);
  switch (experiment) {
    case Experiment::Factors:
    case Experiment::Oracle:
      c.betas = {3.0, 4.0, 5.0};
      c.v_dbs = range(0.0, 2.0, 40.0);
      break;
    case Experiment::Blocking:
      c.betas = {2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
      c.v_dbs = range(0.0, 5.0, 30.0);
      c.traffic = {46.2, 34.6, 23.1};
      break;
  }
  return c;
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "model") {
    if (value == "hex") c.model = ModelKind::Hex;
    else if (value == "poisson") c.model = ModelKind::Poisson;
    else throw Error(fmt::format("model: expected hex or poisson, got '{}'", value));
    if (!c.grid_orders_explicit) c.grid_orders = default_grid_orders(c.experiment, c.model);
  } else if (key == "grid_orders" || key == "grid_order") {
    c.grid_orders.clear();
    for (double v : parse_double_list(key, value)) {
      if (v != std::floor(v)) throw Error(fmt::format("{}: '{}' is not an integer", key, v));
      c.grid_orders.push_back(static_cast<int>(v));
    }
    c.grid_orders_explicit = true;
  } else if (key == "delta_km") {
    c.delta_km = parse_number<double>(key, value);
  } else if (key == "k_per_km") {
    c.k_per_km = parse_number<double>(key, value);
  } else if (key == "betas" || key == "beta") {
    c.betas = parse_double_list(key, value);
  } else if (key == "v_dbs" || key == "v_db") {
    c.v_dbs = parse_double_list(key, value);
  } else if (key == "traffic") {
    c.traffic = parse_double_list(key, value);
  } else if (key == "policy") {
    if (value == "smallest_path_loss" || value == "smallest") c.policy = HandoverPolicy::SmallestPathLoss;
    else if (value == "closest") c.policy = HandoverPolicy::GeographicallyClosest;
    else throw Error(fmt::format("policy: expected smallest_path_loss or closest, got '{}'", value));
  } else if (key == "tech") {
    if (value == "ofdma") c.tech = Technology::Ofdma;
    else if (value == "cdma") c.tech = Technology::Cdma;
    else throw Error(fmt::format("tech: expected ofdma or cdma, got '{}'", value));
  } else if (key == "bandwidth_hz") {
    c.radio.bandwidth_hz = parse_number<double>(key, value);
  } else if (key == "max_power_dbm") {
    c.radio.max_power_dbm = parse_number<double>(key, value);
  } else if (key == "common_channel_fraction") {
    c.radio.common_channel_fraction = parse_number<double>(key, value);
  } else if (key == "orthogonality") {
    c.radio.orthogonality = parse_number<double>(key, value);
  } else if (key == "noise_power_dbm") {
    c.radio.noise_power_dbm = parse_number<double>(key, value);
  } else if (key == "psi_scale") {
    c.radio.psi_scale = parse_number<double>(key, value);
  } else if (key == "bit_rate_bps") {
    c.service.bit_rate_bps = parse_number<double>(key, value);
  } else if (key == "n_samples") {
    c.n_samples = parse_number<std::size_t>(key, value);
  } else if (key == "locations") {
    c.locations = parse_number<std::size_t>(key, value);
  } else if (key == "realizations") {
    c.realizations = parse_number<std::size_t>(key, value);
  } else if (key == "capacity_units") {
    c.capacity_units = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out") {
    c.out = std::string(value);
  } else if (key == "threads") {
    c.threads = parse_number<unsigned>(key, value);
  } else {
    throw Error(fmt::format("unknown setting '{}'", key));
  }
}

void load_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config file '{}'", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    try {
      apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

void validate(const ExperimentConfig& c) {
  if (c.betas.empty()) throw Error("beta list is empty");
  if (c.v_dbs.empty()) throw Error("v list is empty");
  if (c.experiment != Experiment::Oracle && c.grid_orders.empty()) throw Error("grid_order list is empty");
  if (c.experiment == Experiment::Blocking && c.traffic.empty()) throw Error("traffic list is empty");
  for (int n : c.grid_orders) TorusSpec(n, c.delta_km);
  if (!(c.delta_km > 0.0)) throw Error("delta_km must be positive");
  for (double b : c.betas) DistanceLossParams(c.k_per_km, b);
  for (double v : c.v_dbs) ShadowingModel::log_normal(v);
  for (double t : c.traffic)
    if (!(t >= 0.0)) throw Error(fmt::format("traffic must be non-negative, got {}", t));
  if (c.experiment == Experiment::Factors && c.n_samples < 2) throw Error("n_samples must be at least 2");
  if (c.experiment == Experiment::Blocking) {
    if (c.realizations < 1) throw Error("realizations must be at least 1");
    if (c.capacity_units < 1) throw Error("capacity_units must be at least 1");
    if (!(c.service.bit_rate_bps > 0.0)) throw Error("bit_rate_bps must be positive");
    c.radio.validate();
  }
}

std::string_view factors_csv_header() {
  return "model,grid_order,delta_km,beta,v_db,policy,n_samples,mean_f,se_f,mean_l,se_l,mean_l_db,seed,"
         "mean_of_l_db,se_of_l_db,k_per_km,resamples,oracle_mean_f,oracle_mean_l,oracle_mean_l_db";
}

std::string_view blocking_csv_header() {
  return "tech,model,grid_order,delta_km,beta,v_db,traffic_erlang_km2,C,M,R,mean_blocking,se,seed,"
         "k_per_km,bit_rate_bps,resamples";
}

std::string_view oracle_csv_header() {
  return "beta,v_db,k_per_km,lambda_bs_km2,poisson_mean_f,poisson_mean_l,poisson_mean_l_db,"
         "hex_mean_f_approx,hex_mean_l_approx,hex_mean_l_approx_db,closest_bs_mean_f,"
         "closest_bs_mean_f_serving_excluded,closest_bs_penalty_db";
}

SweepWriter::SweepWriter(std::ostream& stream, std::string_view header) : out_(&stream) {
  *out_ << header << '\n';
  out_->flush();
}

SweepWriter::SweepWriter(const std::filesystem::path& path, std::string_view header, bool resume) {
  const auto index_path = std::filesystem::path(path.string() + ".done");
  std::vector<std::string> kept_rows;
  std::vector<std::string> kept_keys;
  if (resume && std::filesystem::exists(path)) {
    std::ifstream csv(path);
    std::string line;
    if (std::getline(csv, line) && line == header) {
      std::vector<std::string> rows;
      while (std::getline(csv, line)) rows.push_back(line);
      std::vector<std::string> keys;
      std::ifstream idx(index_path);
      while (std::getline(idx, line))
        if (!line.empty()) keys.push_back(line);
      const std::size_t k = std::min(rows.size(), keys.size());
      kept_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k));
      kept_keys.assign(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  auto file = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*file) throw Error(fmt::format("cannot open output '{}'", path.string()));
  *file << header << '\n';
  for (const auto& r : kept_rows) *file << r << '\n';
  file->flush();
  auto index = std::make_unique<std::ofstream>(index_path, std::ios::trunc);
  if (!*index) throw Error(fmt::format("cannot open done index '{}'", index_path.string()));
  for (const auto& k : kept_keys) {
    *index << k << '\n';
    done_.insert(k);
  }
  index->flush();
  out_ = file.get();
  owned_ = std::move(file);
  index_ = std::move(index);
}

SweepWriter::~SweepWriter() = default;

void SweepWriter::write_row(const std::string& key, const std::string& row) {
  *out_ << row << '\n';
  out_->flush();
  if (!*out_) throw Error("failed writing CSV row");
  if (index_) {
    *index_ << key << '\n';
    index_->flush();
  }
  done_.insert(key);
}

void run_factors(const ExperimentConfig& c, SweepWriter& writer, std::ostream& progress) {
  validate(c);
  const std::size_t total = c.grid_orders.size() * c.betas.size() * c.v_dbs.size();
  std::size_t cell = 0;
  for (int n : c.grid_orders) {
    const LayoutModel model = make_model(c, n);
    for (double beta : c.betas) {
      for (double v : c.v_dbs) {
        ++cell;
        const std::string key = fmt::format("{}|{}|{}|{}", model_name(c.model), n, beta, v);
        if (writer.done(key)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        FactorOptions opt;
        opt.shadowing = make_shadowing(v);
        opt.loss = DistanceLossParams(c.k_per_km, beta);
        opt.policy = c.policy;
        opt.n_samples = c.n_samples;
        opt.root_seed = c.seed;
        opt.threads = c.threads;
        const FactorEstimate est = estimate_factors(model, opt);

        std::string oracle_cols = ",,";
        if (c.model == ModelKind::Poisson) {
          const double lambda = hex_intensity(c.delta_km);
          const double of = c.policy == HandoverPolicy::SmallestPathLoss
                                ? oracle::poisson_mean_f(beta)
                                : oracle::closest_bs_poisson_mean_f_serving_excluded(beta, v);
          const double ol = oracle::poisson_mean_l_lognormal(beta, c.k_per_km, lambda, v);
          oracle_cols = fmt::format("{},{},{}", of, ol, 10.0 * std::log10(ol));
        }
        writer.write_row(key, fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                                          model_name(c.model), n, c.delta_km, beta, v, policy_name(c.policy),
                                          est.n_samples, est.mean_f, est.se_f, est.mean_l, est.se_l, est.mean_l_db,
                                          c.seed, est.mean_of_l_db, est.se_of_l_db, c.k_per_km, est.resamples,
                                          oracle_cols));
        progress << fmt::format("[{}/{}] {} n={} beta={} v={}: mean_f={:.5g} se_f={:.2g} mean_l_db={:.4g} ({:.1f} s)\n",
                                cell, total, model_name(c.model), n, beta, v, est.mean_f, est.se_f, est.mean_l_db,
                                seconds_since(t0));
        if (est.mean_l > 0.0 && est.se_l / est.mean_l > 0.05)
          progress << fmt::format("warning: n={} beta={} v={}: relative standard error of mean_l is {:.1f}%\n", n,
                                  beta, v, 100.0 * est.se_l / est.mean_l);
        progress.flush();
      }
    }
  }
}

void run_blocking(const ExperimentConfig& c, SweepWriter& writer, std::ostream& progress) {
  validate(c);
  const std::size_t total = c.grid_orders.size() * c.betas.size() * c.v_dbs.size() * c.traffic.size();
  std::size_t cell = 0;
  for (int n : c.grid_orders) {
    const LayoutModel model = make_model(c, n);
    const std::size_t locations = c.locations > 0 ? c.locations : static_cast<std::size_t>(30) * n * n;
    for (double beta : c.betas) {
      for (double v : c.v_dbs) {
        for (double traffic : c.traffic) {
          ++cell;
          const std::string key = fmt::format("{}|{}|{}|{}|{}|{}", tech_name(c.tech), model_name(c.model), n, beta,
                                              v, traffic);
          if (writer.done(key)) continue;
          const auto t0 = std::chrono::steady_clock::now();
          BlockingOptions opt;
          opt.shadowing = make_shadowing(v);
          opt.loss = DistanceLossParams(c.k_per_km, beta);
          opt.radio = c.radio;
          opt.service = c.service;
          opt.traffic.density_erlang_per_km2 = traffic;
          opt.tech = c.tech;
          opt.capacity_units = c.capacity_units;
          opt.locations = locations;
          opt.realizations = c.realizations;
          opt.root_seed = c.seed;
          opt.threads = c.threads;
          const BlockingResult res = blocking_probability(model, opt);
          writer.write_row(key, fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", tech_name(c.tech),
                                            model_name(c.model), n, c.delta_km, beta, v, traffic, c.capacity_units,
                                            locations, c.realizations, res.mean_blocking, res.se, c.seed,
                                            c.k_per_km, c.service.bit_rate_bps, res.resamples));
          progress << fmt::format("[{}/{}] {} n={} beta={} v={} traffic={}: blocking={:.4g} se={:.2g} ({:.1f} s)\n",
                                  cell, total, tech_name(c.tech), n, beta, v, traffic, res.mean_blocking, res.se,
                                  seconds_since(t0));
          progress.flush();
        }
      }
    }
  }
}

void run_oracle(const ExperimentConfig& c, SweepWriter& writer, std::ostream& progress) {
  validate(c);
  const double lambda = hex_intensity(c.delta_km);
  for (double beta : c.betas) {
    for (double v : c.v_dbs) {
      const std::string key = fmt::format("oracle|{}|{}", beta, v);
      if (writer.done(key)) continue;
      const double pl = oracle::poisson_mean_l_lognormal(beta, c.k_per_km, lambda, v);
      const double hl = oracle::hex_mean_l_approx(beta, c.k_per_km, lambda);
      writer.write_row(key, fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", beta, v, c.k_per_km, lambda,
                                        oracle::poisson_mean_f(beta), pl, 10.0 * std::log10(pl),
                                        oracle::hex_mean_f_approx(beta), hl, 10.0 * std::log10(hl),
                                        oracle::closest_bs_poisson_mean_f(beta, v),
                                        oracle::closest_bs_poisson_mean_f_serving_excluded(beta, v),
                                        oracle::closest_bs_penalty_db(v)));
    }
  }
  progress << fmt::format("oracle: {} rows\n", c.betas.size() * c.v_dbs.size());
}

void run_experiment(const ExperimentConfig& config, bool resume, std::ostream& stdout_stream, std::ostream& progress) {
  validate(config);
  std::string_view header;
  switch (config.experiment) {
    case Experiment::Factors: header = factors_csv_header(); break;
    case Experiment::Blocking: header = blocking_csv_header(); break;
    case Experiment::Oracle: header = oracle_csv_header(); break;
  }
  std::unique_ptr<SweepWriter> writer =
      config.out.empty() ? std::make_unique<SweepWriter>(stdout_stream, header)
                         : std::make_unique<SweepWriter>(std::filesystem::path(config.out), header, resume);
  switch (config.experiment) {
    case Experiment::Factors: run_factors(config, *writer, progress); break;
    case Experiment::Blocking: run_blocking(config, *writer, progress); break;
    case Experiment::Oracle: run_oracle(config, *writer, progress); break;
  }
}

}  // namespace cellqos
