#include "ssrn/io/report.hpp"

#include <cstdio>

namespace ssrn::io {

namespace {

using nlohmann::json;

std::string recall_key(std::size_t n, double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "R@%zu,IoU=%.1f", n, m);
  return buf;
}

json table(const std::array<std::array<double, 3>, 2>& recall) {
  json t = json::object();
  for (std::size_t r = 0; r < train::kRecallRanks.size(); ++r)
    for (std::size_t i = 0; i < train::kRecallIous.size(); ++i)
      t[recall_key(train::kRecallRanks[r], train::kRecallIous[i])] = recall[r][i];
  return t;
}

}  // namespace

json metrics_json(const train::MetricsReport& report) {
  return {{"samples", report.samples},
          {"decode", report.refined ? "refined" : "hard"},
          {"recall", table(report.recall)},
          {"recall_hard", table(report.recall_hard)},
          {"recall_refined", table(report.recall_refined)},
          {"mean_iou", report.mean_iou},
          {"mean_boundary_error_hard", report.mean_error_hard},
          {"mean_boundary_error_refined", report.mean_error_refined},
          {"clamped_refinements", report.clamped}};
}

json bias_json(const sampling::BiasReport& report) {
  return {{"annotations", report.ious.size()}, {"mean_iou", report.mean_iou},
          {"min_iou", report.min_iou},         {"max_drift", report.max_drift},
          {"mean_drift", report.mean_drift},   {"iou_histogram", report.histogram}};
}

json prediction_json(const std::string& id, const heads::SegmentPrediction& p) {
  return {{"id", id},
          {"hard", {p.hard_start, p.hard_end}},
          {"refined", {p.refined_start, p.refined_end}},
          {"time", {p.time_start, p.time_end}},
          {"score", p.score},
          {"clamped", p.clamped}};
}

json grad_json(const ad::GradReport& report) {
  json params = json::array();
  for (const auto& p : report.params)
    params.push_back({{"name", p.name}, {"max_rel_error", p.max_rel_error}, {"worst_element", p.worst_element},
                      {"analytic", p.analytic}, {"numeric", p.numeric}});
  json out{{"passed", report.passed}, {"max_rel_error", report.max_rel_error()}, {"eps", report.eps},
           {"tolerance", report.tolerance}, {"worst_param", report.worst_param()}, {"params", params}};
  if (!report.failure.empty()) out["failure"] = report.failure;
  return out;
}

}  // namespace ssrn::io
