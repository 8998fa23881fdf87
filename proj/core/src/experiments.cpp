#include "aerocap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace aerocap {

std::vector<std::uint64_t> SweepOptions::seed_list() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < seeds; ++i) out.push_back(base_seed + static_cast<std::uint64_t>(i));
  return out;
}

void SweepOptions::validate() const {
  if (seeds < 1) throw InvalidArgument("seeds must be >= 1");
  if (jobs < 0) throw InvalidArgument("jobs must be >= 0");
  if (noise_levels.empty()) throw InvalidArgument("at least one noise level is required");
  for (double s : noise_levels)
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("noise levels must be finite and >= 0");
}

const SweepSummary& SweepResult::cell(const std::string& variant, double noise_sigma) const {
  for (const auto& s : summary)
    if (s.variant == variant && s.noise_sigma == noise_sigma) return s;
  throw InvalidArgument("no sweep cell for " + variant);
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  // Report the first failure in job order so errors do not depend on scheduling.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const std::string& parameter, const std::vector<SweepVariant>& variants,
                      const SweepOptions& opts) {
  opts.validate();
  if (variants.empty()) throw InvalidArgument("sweep needs at least one variant");
  for (const auto& v : variants) v.scenario.validate();

  const auto seeds = opts.seed_list();
  const std::size_t nn = opts.noise_levels.size();
  const std::size_t jobs = variants.size() * seeds.size();
  // Row index: ((variant * noise) + noise_index) * seeds + seed_index.
  std::vector<SweepRow> rows(jobs * nn);

  parallel_for(jobs, opts.jobs, [&](std::size_t job) {
    const std::size_t vi = job / seeds.size(), si = job % seeds.size();
    Scenario s = variants[vi].scenario;
    s.seed = seeds[si];
    const CaptureRun capture = simulate_capture(s);
    for (std::size_t ni = 0; ni < nn; ++ni) {
      NoiseModel noise = s.noise;
      noise.pose_position_sigma = opts.noise_levels[ni];
      const RunTrace trace = reconstruct_run(s, capture, noise);
      SweepRow& row = rows[(vi * nn + ni) * seeds.size() + si];
      row.variant = variants[vi].label;
      row.noise_sigma = opts.noise_levels[ni];
      row.seed = s.seed;
      row.total_error = trace.error.total;
      row.mean_mpjpe = trace.error.mean_mpjpe;
      row.mean_tilt = capture.mean_realized_tilt;
      row.max_tilt = capture.max_realized_tilt;
      row.min_clearance = capture.min_clearance;
      row.carried_joints = trace.stats.carried_joints;
    }
  });

  SweepResult result;
  result.parameter = parameter;
  for (const auto& v : variants) result.variants.push_back(v.label);
  result.rows = std::move(rows);
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      SweepSummary sum;
      sum.variant = variants[vi].label;
      sum.noise_sigma = opts.noise_levels[ni];
      sum.runs = static_cast<int>(seeds.size());
      std::vector<double> mp, tot;
      double tilt = 0.0;
      sum.tilt_max = -kPi;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const SweepRow& r = result.rows[(vi * nn + ni) * seeds.size() + si];
        mp.push_back(r.mean_mpjpe);
        tot.push_back(r.total_error);
        tilt += r.mean_tilt;
        sum.tilt_max = std::max(sum.tilt_max, r.max_tilt);
      }
      const double n = static_cast<double>(seeds.size());
      for (double x : mp) sum.mpjpe_mean += x / n;
      for (double x : tot) sum.total_mean += x / n;
      sum.mpjpe_std = sample_std(mp, sum.mpjpe_mean);
      sum.total_std = sample_std(tot, sum.total_mean);
      sum.tilt_mean = tilt / n;
      result.summary.push_back(sum);
    }
  }
  return result;
}

SweepResult experiment_tilt_sweep(const Scenario& base, const SweepOptions& opts) {
  std::vector<SweepVariant> variants;
  for (int deg : {0, 15, 30, 45, 60}) {
    Scenario s = base;
    s.formation.phi_form = deg_to_rad(deg);
    variants.push_back({std::to_string(deg), s});
  }
  return run_sweep("tilt_deg", variants, opts);
}

SweepResult experiment_robot_sweep(const Scenario& base, const SweepOptions& opts) {
  std::vector<SweepVariant> variants;
  for (int n = 2; n <= 5; ++n) {
    Scenario s = base;
    s.formation.n = n;
    s.formation.phi_form = deg_to_rad(15.0);
    variants.push_back({std::to_string(n), s});
  }
  return run_sweep("n", variants, opts);
}

SweepResult run_fixed_vs_adaptive(const Scenario& base, const SweepOptions& opts) {
  Scenario adaptive = base, fixed = base;
  adaptive.adaptive = true;
  fixed.adaptive = false;
  return run_sweep("variant", {{"adaptive", adaptive}, {"fixed", fixed}}, opts);
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << result.parameter
     << ",noise_sigma_m,seed,total_E_recon,mean_mpjpe_m,mean_tilt_deg,max_tilt_deg,min_clearance_m,carried_joints\n";
  for (const auto& r : result.rows) {
    os << r.variant << ',' << fmt(r.noise_sigma, "%g") << ',' << r.seed << ',' << fmt(r.total_error, "%.9g") << ','
       << fmt(r.mean_mpjpe, "%.9g") << ',' << fmt(rad_to_deg(r.mean_tilt), "%.4f") << ','
       << fmt(rad_to_deg(r.max_tilt), "%.4f") << ',' << fmt(r.min_clearance, "%.4f") << ',' << r.carried_joints
       << '\n';
  }
}

void write_summary_csv(std::ostream& os, const SweepResult& result) {
  os << result.parameter
     << ",noise_sigma_m,runs,mean_mpjpe_m,std_mpjpe_m,mean_E_recon,std_E_recon,mean_tilt_deg,max_tilt_deg\n";
  for (const auto& s : result.summary) {
    os << s.variant << ',' << fmt(s.noise_sigma, "%g") << ',' << s.runs << ',' << fmt(s.mpjpe_mean, "%.9g") << ','
       << fmt(s.mpjpe_std, "%.9g") << ',' << fmt(s.total_mean, "%.9g") << ',' << fmt(s.total_std, "%.9g") << ','
       << fmt(rad_to_deg(s.tilt_mean), "%.4f") << ',' << fmt(rad_to_deg(s.tilt_max), "%.4f") << '\n';
  }
}

}  // namespace aerocap
