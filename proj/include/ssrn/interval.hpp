#pragma once

namespace ssrn {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// Temporal intersection-over-union. Two zero-length intervals at the same
/// point have IoU 1; any other zero-length union gives 0. Raises
/// ValidationError when start > end.
double iou(Interval a, Interval b);

}  // namespace ssrn
