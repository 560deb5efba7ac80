// Copyright 2026 The socialmask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socialmask/train/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace socialmask
{

namespace
{

void check_inputs(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts, const char * what)
{
  if (preds.empty()) {
    throw std::invalid_argument(std::string(what) + ": no instances");
  }
  if (preds.size() != gts.size()) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(preds.size()) + " predictions vs " +
                                std::to_string(gts.size()) + " ground truths");
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].empty() || preds[i].size() != gts[i].size()) {
      throw std::invalid_argument(std::string(what) + ": instance " + std::to_string(i) +
                                  " has mismatched or empty steps");
    }
  }
}

/// Per-instance mean, max and final displacement.
DisplacementMetrics instance_errors(const Trajectory & p, const Trajectory & g)
{
  DisplacementMetrics m;
  m.count = 1;
  double total = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    const double d = distance(p[t], g[t]);
    total += d;
    m.mde = std::max(m.mde, d);
  }
  m.ade = total / static_cast<double>(p.size());
  m.fde = distance(p.back(), g.back());
  return m;
}

template <typename Pick>
double mean_of(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts, Pick pick)
{
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total += pick(instance_errors(preds[i], gts[i]));
  }
  return total / static_cast<double>(preds.size());
}

}  // namespace

double ade(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts)
{
  check_inputs(preds, gts, "ade");
  return mean_of(preds, gts, [](const DisplacementMetrics & m) { return m.ade; });
}

double mde(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts)
{
  check_inputs(preds, gts, "mde");
  return mean_of(preds, gts, [](const DisplacementMetrics & m) { return m.mde; });
}

double fde(const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts)
{
  check_inputs(preds, gts, "fde");
  return mean_of(preds, gts, [](const DisplacementMetrics & m) { return m.fde; });
}

MetricsReport compute_metrics(
  const std::vector<Trajectory> & preds, const std::vector<Trajectory> & gts, const std::vector<AgentClass> & classes)
{
  check_inputs(preds, gts, "compute_metrics");
  if (classes.size() != preds.size()) {
    throw std::invalid_argument("compute_metrics: class list length differs from the predictions");
  }
  MetricsReport r;
  std::array<DisplacementMetrics, kAgentClassCount> sums{};
  DisplacementMetrics all;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const DisplacementMetrics m = instance_errors(preds[i], gts[i]);
    for (DisplacementMetrics * s : {&all, &sums[class_index(classes[i])]}) {
      s->count += 1;
      s->ade += m.ade;
      s->mde += m.mde;
      s->fde += m.fde;
    }
  }
  auto finish = [](DisplacementMetrics s) {
    const double n = static_cast<double>(s.count);
    s.ade /= n;
    s.mde /= n;
    s.fde /= n;
    return s;
  };
  r.all = finish(all);
  for (std::size_t c = 0; c < kAgentClassCount; ++c) {
    if (sums[c].count > 0) {
      r.per_class[c] = finish(sums[c]);
    }
  }
  return r;
}

std::string metrics_to_json(const MetricsReport & report)
{
  auto row = [](const DisplacementMetrics & m) { return nlohmann::json{{"ADE", m.ade}, {"MDE", m.mde}, {"FDE", m.fde}}; };
  nlohmann::json j;
  j["all"] = row(report.all);
  for (auto cls : kAgentClasses) {
    const auto & m = report.per_class[class_index(cls)];
    j[std::string(to_string(cls))] = m ? row(*m) : nlohmann::json(nullptr);
  }
  return j.dump(2);
}

std::string metrics_details_json(const MetricsReport & report)
{
  nlohmann::json counts;
  counts["all"] = report.all.count;
  for (auto cls : kAgentClasses) {
    const auto & m = report.per_class[class_index(cls)];
    counts[std::string(to_string(cls))] = m ? m->count : 0;
  }
  nlohmann::json j = {{"instances", counts},
                      {"throughput_calls_per_s", report.throughput},
                      {"throughput_calls", report.throughput_calls}};
  return j.dump(2);
}

}  // namespace socialmask
