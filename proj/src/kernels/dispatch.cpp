#include <atomic>
#include <cstdlib>
#include <string_view>

#include "cellqos/error.hpp"
#include "cellqos/kernels.hpp"

namespace cellqos::kernels {

namespace {

Level initial_level() {
  const char* env = std::getenv("CELLQOS_KERNELS");
  if (env != nullptr && std::string_view(env) == "scalar") return Level::Scalar;
  return detected_level();
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

Level detected_level() {
#if defined(CELLQOS_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Level::Avx2;
#endif
  return Level::Scalar;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) level = Level::Scalar;
  current().store(level, std::memory_order_relaxed);
}

const char* level_name(Level level) { return level == Level::Avx2 ? "avx2" : "scalar"; }

#if defined(CELLQOS_HAVE_AVX2_KERNELS)
#define CELLQOS_DISPATCH(fn, ...) \
  (active_level() == Level::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define CELLQOS_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void fill_uniform(LaneRng& rng, std::span<double> out) { CELLQOS_DISPATCH(fill_uniform, rng, out); }

void fill_normal(LaneRng& rng, std::span<double> out) { CELLQOS_DISPATCH(fill_normal, rng, out); }

GainSummary gain_reduce(const GainInputs& in) {
  if (in.xs.empty() || in.xs.size() != in.ys.size() || (!in.normals.empty() && in.normals.size() != in.xs.size()))
    throw Error("gain_reduce: mismatched or empty inputs");
  return CELLQOS_DISPATCH(gain_reduce, in);
}

void exp_array(std::span<const double> in, std::span<double> out) {
  if (out.size() < in.size()) throw Error("exp_array: output too small");
  CELLQOS_DISPATCH(exp_array, in, out);
}

void log_array(std::span<const double> in, std::span<double> out) {
  if (out.size() < in.size()) throw Error("log_array: output too small");
  CELLQOS_DISPATCH(log_array, in, out);
}

}  // namespace cellqos::kernels
