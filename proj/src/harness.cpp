#include "fairalloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "fairalloc/distributions.hpp"

namespace fairalloc {

namespace {

ReplicationResult replicate(const ExperimentConfig& config, const std::shared_ptr<const Instance>& inst,
                            std::size_t replication) {
  ReplicationResult out;
  out.replication = replication;
  out.realized = sample_episode(*inst, SeededRng(config.seed), replication);

  const OfflineSolution hindsight = offline_solve(*inst, out.realized, config.solver);
  MetricRecord base = evaluate(*inst, out.realized, hindsight.allocation, hindsight.allocation);
  base.converged = hindsight.program.converged;

  const double lipschitz = lipschitz_bound(*inst);
  const double size = effective_size(*inst);
  for (PolicyId policy : config.policies) {
    MetricRecord rec;
    if (policy == PolicyId::Offline) {
      rec = base;
    } else {
      const EpisodeResult ep = run_policy(policy, inst, out.realized, config.solver);
      if (ep.realized != out.realized) throw std::logic_error("policy saw a different episode");
      rec = evaluate(*inst, out.realized, ep.allocation, hindsight.allocation);
      rec.converged = ep.converged && base.converged;
    }
    rec.policy = policy;
    rec.seed = replication;
    for (auto& v : check_eclose(rec, lipschitz, size, inst->agent_count(), &base)) {
      out.violations.push_back(std::string(policy_name(policy)) + " replication " + std::to_string(replication) +
                               ": " + v);
    }
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace

std::vector<double> derive_budget(const Instance& instance) {
  std::vector<double> b;
  for (const auto& a : instance.agents) {
    const auto mu = a.distribution.mean();
    if (b.empty()) b.assign(mu.size(), 0.0);
    if (mu.size() != b.size()) throw std::invalid_argument("agent types disagree on the number of resources");
    for (std::size_t k = 0; k < mu.size(); ++k) b[k] += a.size * mu[k];
  }
  return b;
}

std::vector<PolicyId> default_policies(UtilityFamily family) { return online_policies(family); }

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t replication) {
  return replicate(config, std::make_shared<const Instance>(config.instance), replication);
}

std::vector<AggregateRow> aggregate(const std::vector<MetricRecord>& records, std::size_t* non_converged) {
  std::size_t skipped = 0;
  std::vector<AggregateRow> rows;
  for (PolicyId policy : all_policies()) {
    std::vector<std::array<double, kMetricCount>> samples;
    bool seen = false;
    for (const auto& r : records) {
      if (r.policy != policy) continue;
      seen = true;
      if (!r.converged) {
        ++skipped;
        continue;
      }
      samples.push_back(r.values());
    }
    if (!seen) continue;
    const double count = static_cast<double>(samples.size());
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      AggregateRow row;
      row.policy = policy;
      row.metric = std::string(kMetricNames[m]);
      row.count = samples.size();
      double sum = 0.0;
      for (const auto& s : samples) sum += s[m];
      row.mean = samples.empty() ? std::nan("") : sum / count;
      if (samples.size() > 1) {
        double ss = 0.0;
        for (const auto& s : samples) ss += (s[m] - row.mean) * (s[m] - row.mean);
        row.ci_halfwidth = 1.96 * std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
      }
      rows.push_back(std::move(row));
    }
  }
  if (non_converged) *non_converged = skipped;
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
  require_valid(config.instance);
  const auto inst = std::make_shared<const Instance>(config.instance);

  const std::size_t reps = config.replications;
  std::vector<ReplicationResult> results(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        results[r] = replicate(config, inst, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, reps);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult out;
  for (auto& r : results) {
    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
    out.violations.insert(out.violations.end(), r.violations.begin(), r.violations.end());
  }
  out.rows = aggregate(out.records, &out.non_converged);
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "policy,metric,mean,ci_halfwidth\n";
  for (const auto& r : rows) {
    out += policy_name(r.policy);
    out += ',' + r.metric + ',' + format_double(r.mean) + ',' + format_double(r.ci_halfwidth) + '\n';
  }
  return out;
}

std::string records_to_csv(const std::vector<MetricRecord>& records) {
  std::string out = "policy,seed";
  for (auto name : kMetricNames) (out += ',') += name;
  out += '\n';
  for (const auto& r : records) {
    out += policy_name(r.policy);
    out += ',' + std::to_string(r.seed);
    for (double v : r.values()) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace

void export_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  write_file(path, aggregates_to_csv(rows));
}

void export_records_csv(const std::vector<MetricRecord>& records, const std::string& path) {
  write_file(path, records_to_csv(records));
}

}  // namespace fairalloc
