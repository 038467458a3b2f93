#include "ssrn/interval.hpp"

#include <algorithm>
#include <string>

#include "ssrn/errors.hpp"

namespace ssrn {

double iou(Interval a, Interval b) {
  if (a.start > a.end || b.start > b.end)
    throw ValidationError("iou: interval with start > end ([" + std::to_string(a.start) + ", " +
                          std::to_string(a.end) + "] vs [" + std::to_string(b.start) + ", " +
                          std::to_string(b.end) + "])");
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = a.length() + b.length() - inter;
  if (uni <= 0.0) return (a.start == b.start && a.end == b.end) ? 1.0 : 0.0;
  return inter / uni;
}

}  // namespace ssrn
