#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "cellqos/rng.hpp"

namespace cellqos::testing {

namespace {

void enumerate(std::span<const TrafficClass> classes, std::size_t j, std::int64_t used, double weight,
               int capacity, std::vector<double>& by_occupancy) {
  if (j == classes.size()) {
    by_occupancy[static_cast<std::size_t>(used)] += weight;
    return;
  }
  double w = weight;
  for (std::int64_t n = 0; used + n * classes[j].demand <= capacity; ++n) {
    if (n > 0) w *= classes[j].rho / static_cast<double>(n);
    enumerate(classes, j + 1, used + n * classes[j].demand, w, capacity, by_occupancy);
  }
}

}  // namespace

KaufmanRobertsResult enumerate_loss_system(std::span<const TrafficClass> classes, int capacity_units) {
  std::vector<TrafficClass> admitted;
  for (const auto& c : classes)
    if (c.demand <= capacity_units) admitted.push_back(c);

  std::vector<double> occ(static_cast<std::size_t>(capacity_units) + 1, 0.0);
  enumerate(admitted, 0, 0, 1.0, capacity_units, occ);
  double total = 0.0;
  for (double g : occ) total += g;
  for (double& g : occ) g /= total;

  KaufmanRobertsResult out;
  out.occupancy = occ;
  for (const auto& c : classes) {
    if (c.demand > capacity_units) {
      out.blocking.push_back(1.0);
      continue;
    }
    double b = 0.0;
    for (int m = capacity_units - static_cast<int>(c.demand) + 1; m <= capacity_units; ++m)
      b += occ[static_cast<std::size_t>(m)];
    out.blocking.push_back(b);
  }
  return out;
}

SimulatedBlocking simulate_loss_system(std::span<const TrafficClass> classes, int capacity_units,
                                       std::uint64_t arrivals, std::uint64_t warmup, int batches,
                                       std::uint64_t seed) {
  const std::size_t k = classes.size();
  Xoshiro256pp rng(derive_seed(seed, StreamTag::kLossSystem, 0));
  std::exponential_distribution<double> holding(1.0);

  double total_rate = 0.0;
  std::vector<double> cumulative;
  for (const auto& c : classes) {
    total_rate += c.rho;
    cumulative.push_back(total_rate);
  }
  std::exponential_distribution<double> interarrival(total_rate);

  struct Departure {
    double time;
    std::int64_t units;
    bool operator>(const Departure& o) const { return time > o.time; }
  };
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> busy;
  std::int64_t used = 0;
  double now = 0.0;

  const std::uint64_t per_batch = arrivals / static_cast<std::uint64_t>(batches);
  std::vector<std::vector<double>> offered(static_cast<std::size_t>(batches), std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> blocked = offered;

  for (std::uint64_t a = 0; a < warmup + per_batch * static_cast<std::uint64_t>(batches); ++a) {
    now += interarrival(rng);
    while (!busy.empty() && busy.top().time <= now) {
      used -= busy.top().units;
      busy.pop();
    }
    const double pick = rng.uniform() * total_rate;
    std::size_t j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                             cumulative.begin());
    j = std::min(j, k - 1);
    const bool admit = used + classes[j].demand <= capacity_units;
    if (admit) {
      used += classes[j].demand;
      busy.push({now + holding(rng), classes[j].demand});
    }
    if (a < warmup) continue;
    const auto batch = static_cast<std::size_t>((a - warmup) / per_batch);
    offered[batch][j] += 1.0;
    if (!admit) blocked[batch][j] += 1.0;
  }

  SimulatedBlocking out;
  out.arrivals = per_batch * static_cast<std::uint64_t>(batches);
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0, sum_sq = 0.0, offered_total = 0.0, blocked_total = 0.0;
    for (int b = 0; b < batches; ++b) {
      const auto& o = offered[static_cast<std::size_t>(b)][j];
      const auto& x = blocked[static_cast<std::size_t>(b)][j];
      offered_total += o;
      blocked_total += x;
      const double p = o > 0.0 ? x / o : 0.0;
      sum += p;
      sum_sq += p * p;
    }
    const double n = batches;
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    out.blocking.push_back(offered_total > 0.0 ? blocked_total / offered_total : 0.0);
    out.se.push_back(std::sqrt(var / n));
  }
  return out;
}

double ks_statistic_vs_normal(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-sample[i] / std::sqrt(2.0));
    d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
  }
  return d;
}

}  // namespace cellqos::testing
