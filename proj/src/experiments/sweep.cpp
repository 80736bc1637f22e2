#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "aircomp/errors.hpp"
#include "aircomp/experiments.hpp"

namespace aircomp {
namespace {

std::uint64_t trial_stream(SweepAxis axis, std::size_t trial) {
  return (static_cast<std::uint64_t>(axis) << 32) | static_cast<std::uint64_t>(trial);
}

template <class T>
void read_opt(const json& obj, const char* key, T& dst) {
  if (const auto it = obj.find(key); it != obj.end()) {
    try {
      dst = it->get<T>();
    } catch (const json::exception&) {
      throw ValidationError(std::string("sweep spec: field '") + key + "' has the wrong type");
    }
  }
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::ST: return "S_T";
    case SweepAxis::K: return "K";
    case SweepAxis::HMean: return "h_mean";
    case SweepAxis::Sigma2: return "sigma2";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::ST, SweepAxis::K, SweepAxis::HMean, SweepAxis::Sigma2}) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("unknown sweep axis '" + std::string(name) +
                        "' (expected S_T, K, h_mean or sigma2)");
}

SweepSpec sweep_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("sweep spec: expected a JSON object");
  SweepSpec spec;
  std::string axis = "S_T";
  read_opt(doc, "axis", axis);
  spec.axis = parse_axis(axis);
  read_opt(doc, "values", spec.values);
  read_opt(doc, "trials", spec.trials);
  read_opt(doc, "seed", spec.seed);
  if (const auto it = doc.find("template"); it != doc.end()) {
    const json& t = *it;
    if (!t.is_object()) throw ValidationError("sweep spec: 'template' must be an object");
    InstanceTemplate& b = spec.base;
    read_opt(t, "K", b.K);
    read_opt(t, "D", b.D);
    if (t.contains("S_T")) {
      double st = 0.0;
      read_opt(t, "S_T", st);
      b.S_T = st;
    }
    if (t.contains("S_T_fraction")) {
      double f = 0.0;
      read_opt(t, "S_T_fraction", f);
      b.S_T_fraction = f;
    }
    read_opt(t, "sigma2", b.sigma2);
    read_opt(t, "h_mean", b.h_mean);
    read_opt(t, "b_max", b.b_max);
    read_opt(t, "c", b.c);
  }
  validate_sweep(spec);
  return spec;
}

json to_json(const SweepSpec& spec) {
  json t{{"K", spec.base.K}};
  if (!spec.base.D.empty()) t["D"] = spec.base.D;
  if (spec.base.S_T) t["S_T"] = *spec.base.S_T;
  if (spec.base.S_T_fraction) t["S_T_fraction"] = *spec.base.S_T_fraction;
  t["sigma2"] = spec.base.sigma2;
  t["h_mean"] = spec.base.h_mean;
  t["b_max"] = spec.base.b_max;
  t["c"] = spec.base.c;
  return {{"axis", std::string(to_string(spec.axis))},
          {"values", spec.values},
          {"trials", spec.trials},
          {"seed", spec.seed},
          {"template", t}};
}

void validate_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("sweep spec: values must not be empty");
  if (spec.trials < 1) throw ValidationError("sweep spec: trials must be >= 1");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) {
      throw ValidationError("sweep spec: values must be strictly increasing");
    }
  }
  if (spec.axis == SweepAxis::K) {
    for (double v : spec.values) {
      if (!(v >= 1.0) || v != std::floor(v)) {
        throw ValidationError("sweep spec: K values must be positive integers");
      }
    }
  }
  if (!spec.base.S_T && !spec.base.S_T_fraction) {
    throw ValidationError("sweep spec: template needs S_T or S_T_fraction");
  }
}

ProblemInstance sweep_instance(const SweepSpec& spec, double value, std::size_t trial) {
  InstanceTemplate t = spec.base;
  switch (spec.axis) {
    case SweepAxis::ST:
      t.S_T = value;
      t.S_T_fraction.reset();
      break;
    case SweepAxis::K: t.K = static_cast<std::size_t>(value); break;
    case SweepAxis::HMean: t.h_mean = value; break;
    case SweepAxis::Sigma2: t.sigma2 = value; break;
  }
  if (t.K == 0) throw ValidationError("sweep instance needs K >= 1");

  const std::vector<double>& pool = t.D.empty() ? default_dataset_sizes() : t.D;
  if (!t.D.empty() && t.D.size() < t.K) {
    throw ValidationError("sweep template lists fewer D values than K");
  }
  const std::vector<double> h =
      sample_channels(t.K, t.h_mean, spec.seed, trial_stream(spec.axis, trial));

  ProblemInstance inst;
  inst.sigma2 = t.sigma2;
  for (std::size_t k = 0; k < t.K; ++k) {
    inst.devices.push_back({h[k], t.b_max, t.c, pool[k % pool.size()]});
  }
  inst.S_T = t.S_T_fraction ? *t.S_T_fraction * inst.total_data() : *t.S_T;
  return inst;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& opts) {
  validate_sweep(spec);
  for (double v : spec.values) require_valid(sweep_instance(spec, v, 0));

  const std::size_t n_pol = kAllPolicies.size();
  const std::size_t n_cells = spec.values.size() * spec.trials;
  std::vector<SweepRow> rows(n_cells * n_pol);
  std::vector<std::exception_ptr> errors(n_cells);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t cell = next++; cell < n_cells; cell = next++) {
      try {
        const std::size_t vi = cell / spec.trials;
        const std::size_t trial = cell % spec.trials;
        const ProblemInstance inst = sweep_instance(spec, spec.values[vi], trial);
        for (std::size_t p = 0; p < n_pol; ++p) {
          const auto t0 = std::chrono::steady_clock::now();
          const Allocation alloc = run_policy(inst, kAllPolicies[p]);
          const auto t1 = std::chrono::steady_clock::now();
          SweepRow& r = rows[cell * n_pol + p];
          r.value = spec.values[vi];
          r.trial = trial;
          r.policy = kAllPolicies[p];
          r.mse = alloc.mse;
          r.a_star = alloc.a;
          r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
      } catch (...) {
        errors[cell] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(n_cells, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     bool with_timing) {
  const std::string axis(to_string(spec.axis));
  const std::size_t n_pol = kAllPolicies.size();
  out << "axis,value,trial,policy,mse,a_star,runtime_ms\n";
  auto emit = [&](double value, const std::string& trial, Policy p, double mse, double a,
                  double ms) {
    out << axis << ',' << format_double(value) << ',' << trial << ',' << to_string(p) << ','
        << format_double(mse) << ',' << format_double(a) << ',';
    if (with_timing) out << format_double(ms);
    out << '\n';
  };
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    const std::size_t first = vi * spec.trials * n_pol;
    std::vector<double> sum_mse(n_pol, 0.0), sum_a(n_pol, 0.0), sum_ms(n_pol, 0.0);
    for (std::size_t i = first; i < first + spec.trials * n_pol; ++i) {
      const SweepRow& r = rows.at(i);
      emit(r.value, std::to_string(r.trial), r.policy, r.mse, r.a_star, r.runtime_ms);
      const std::size_t p = (i - first) % n_pol;
      sum_mse[p] += r.mse;
      sum_a[p] += r.a_star;
      sum_ms[p] += r.runtime_ms;
    }
    const double n = static_cast<double>(spec.trials);
    for (std::size_t p = 0; p < n_pol; ++p) {
      emit(spec.values[vi], "mean", kAllPolicies[p], sum_mse[p] / n, sum_a[p] / n, sum_ms[p] / n);
    }
  }
}

}  // namespace aircomp
