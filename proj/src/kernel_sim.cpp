#include "evtl/kernel_sim.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace evtl {

void IdentityKernel::step(StateView current, std::span<double> next, Engine&) const {
  std::ranges::copy(current.values(), next.begin());
}

namespace {

void check_produced(const DataSpace& space, std::span<const double> next) {
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!space.variable(i).contains(next[i])) {
      throw NumericError(fmt::format("kernel produced off-domain value {} for variable '{}'", next[i],
                                     space.variable(i).name()));
    }
  }
}

void check_initial(const MarkovKernel& kernel, const DataState& initial) {
  if (initial.space_ref() != kernel.space()) {
    throw ConfigError("initial state does not belong to the kernel's data space");
  }
}

// Fills rows [0, steps] of `sink(i)` for one run.
template <typename Sink>
void run_one(const MarkovKernel& kernel, const DataState& initial, int steps, Engine& rng, Sink&& sink) {
  const auto& space = *kernel.space();
  std::vector<double> current(initial.values().begin(), initial.values().end());
  std::vector<double> next(space.size());
  sink(0, std::span<const double>(current));
  for (int i = 1; i <= steps; ++i) {
    kernel.step(StateView(space, current), next, rng);
    check_produced(space, next);
    std::swap(current, next);
    sink(i, std::span<const double>(current));
  }
}

} // namespace

DataState apply_kernel(const MarkovKernel& kernel, const DataState& current, Engine& rng) {
  check_initial(kernel, current);
  std::vector<double> next(current.values().size());
  kernel.step(current.view(), next, rng);
  check_produced(current.space(), next);
  return DataState(current.space_ref(), std::move(next));
}

Trajectory simulate(const MarkovKernel& kernel, const DataState& initial, int steps, Engine& rng) {
  if (steps < 0) throw ConfigError(fmt::format("simulate: negative horizon {}", steps));
  check_initial(kernel, initial);
  Trajectory out{SampleSet(initial.space_ref(), static_cast<std::size_t>(steps) + 1)};
  run_one(kernel, initial, steps, rng,
          [&](int i, std::span<const double> s) { std::ranges::copy(s, out.states.mutable_row(i).begin()); });
  return out;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  const auto n = std::min<std::size_t>(workers, count);
  for (std::size_t w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

EvolutionEstimate estimate(const MarkovKernel& kernel, const DataState& initial, int steps, std::size_t runs,
                           const RandomnessPlan& plan, SimOptions options) {
  if (runs < 1) throw ConfigError("estimate: run count must be at least 1");
  if (steps < 0) throw ConfigError(fmt::format("estimate: negative horizon {}", steps));
  check_initial(kernel, initial);

  EvolutionEstimate out;
  out.runs = runs;
  out.seed = plan.master_seed();
  out.per_step.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) out.per_step.emplace_back(initial.space_ref(), runs);

  parallel_for(runs, options.workers, [&](std::size_t r) {
    auto rng = plan.run_stream(r);
    try {
      run_one(kernel, initial, steps, rng, [&](int i, std::span<const double> s) {
        std::ranges::copy(s, out.per_step[static_cast<std::size_t>(i)].mutable_row(r).begin());
      });
    } catch (const Error& e) {
      throw NumericError(fmt::format("run {}: {}", r, e.what()));
    }
  });
  return out;
}

std::vector<std::vector<double>> mean_evolution(const MarkovKernel& kernel, const DataState& initial, int steps,
                                                std::size_t runs, const RandomnessPlan& plan,
                                                std::span<const std::size_t> variables, SimOptions options) {
  if (runs < 1) throw ConfigError("mean_evolution: run count must be at least 1");
  if (steps < 0) throw ConfigError(fmt::format("mean_evolution: negative horizon {}", steps));
  check_initial(kernel, initial);
  for (auto v : variables) {
    if (v >= initial.space().size()) throw ConfigError("mean_evolution: variable index out of range");
  }

  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (runs + kBlock - 1) / kBlock;
  const std::size_t width = variables.size();
  const std::size_t times = static_cast<std::size_t>(steps) + 1;
  // partial[b][i * width + v]
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(times * width, 0.0));

  parallel_for(blocks, options.workers, [&](std::size_t b) {
    auto& acc = partial[b];
    const std::size_t last = std::min(runs, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < last; ++r) {
      auto rng = plan.run_stream(r);
      run_one(kernel, initial, steps, rng, [&](int i, std::span<const double> s) {
        for (std::size_t v = 0; v < width; ++v) acc[static_cast<std::size_t>(i) * width + v] += s[variables[v]];
      });
    }
  });

  std::vector<std::vector<double>> means(width, std::vector<double>(times, 0.0));
  for (const auto& acc : partial) {
    for (std::size_t i = 0; i < times; ++i) {
      for (std::size_t v = 0; v < width; ++v) means[v][i] += acc[i * width + v];
    }
  }
  for (auto& series : means) {
    for (auto& m : series) m /= static_cast<double>(runs);
  }
  return means;
}

double empirical_measure(const SampleSet& samples, const std::function<bool(StateView)>& indicator) {
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (indicator(samples[j])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

namespace {

void write_header(std::ostream& out, const DataSpace& space) {
  out << "run,time";
  for (const auto& name : space.names()) out << ',' << name;
  out << '\n';
}

void write_row(std::ostream& out, std::size_t run, std::size_t time, std::span<const double> values) {
  out << run << ',' << time;
  for (double v : values) out << ',' << format_real(v);
  out << '\n';
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t run) {
  write_header(out, trajectory.states.space());
  for (std::size_t t = 0; t < trajectory.length(); ++t) write_row(out, run, t, trajectory.states.row(t));
}

void write_estimate_csv(std::ostream& out, const EvolutionEstimate& estimate) {
  write_header(out, estimate.space());
  for (std::size_t r = 0; r < estimate.runs; ++r) {
    for (std::size_t t = 0; t < estimate.per_step.size(); ++t) write_row(out, r, t, estimate.per_step[t].row(r));
  }
}

} // namespace evtl
