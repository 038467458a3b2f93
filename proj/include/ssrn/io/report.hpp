#pragma once

#include <json.hpp>

#include "ssrn/heads.hpp"
#include "ssrn/numcore/grad_check.hpp"
#include "ssrn/sampling.hpp"
#include "ssrn/training/metrics.hpp"

namespace ssrn::io {

/// Keys "R@n,IoU=m" for both decodes plus mean IoU and boundary errors.
nlohmann::json metrics_json(const train::MetricsReport& report);
nlohmann::json bias_json(const sampling::BiasReport& report);
nlohmann::json prediction_json(const std::string& id, const heads::SegmentPrediction& p);
nlohmann::json grad_json(const ad::GradReport& report);

}  // namespace ssrn::io
