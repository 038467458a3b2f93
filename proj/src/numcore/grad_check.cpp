#include "ssrn/numcore/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "ssrn/errors.hpp"

namespace ssrn::ad {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

double GradReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& p : params) m = std::max(m, p.max_rel_error);
  return m;
}

std::string GradReport::worst_param() const {
  const ParamCheck* worst = nullptr;
  for (const auto& p : params)
    if (!worst || p.max_rel_error > worst->max_rel_error) worst = &p;
  return worst ? worst->name : std::string();
}

namespace {

double evaluate(const LossBuilder& build, const ParamStore& params) {
  Graph g(&params);
  const Var loss = build(g);
  const Matrix& v = loss.value();
  if (v.rows() != 1 || v.cols() != 1)
    throw ContractError("grad_check: loss must be 1x1, got " + v.shape_string());
  return v(0, 0);
}

}  // namespace

GradReport grad_check(const LossBuilder& build, ParamStore& params, GradCheckOptions options) {
  if (!(options.eps > 0.0)) throw ValidationError("grad_check: eps must be positive");
  GradReport report;
  report.eps = options.eps;
  report.tolerance = options.tolerance;

  Gradients analytic;
  {
    Graph g(&params);
    const Var loss = build(g);
    g.backward(loss);
    analytic = g.param_grads();
  }

  bool finite = true;
  for (std::size_t p = 0; p < params.size() && finite; ++p) {
    ParamCheck check{params.name(p)};
    Matrix& value = params.value(p);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + options.eps;
      const double up = evaluate(build, params);
      value[i] = saved - options.eps;
      const double down = evaluate(build, params);
      value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        report.failure = "non-finite loss when perturbing " + check.name + "[" + std::to_string(i) + "]";
        finite = false;
        break;
      }
      const double numeric = (up - down) / (2.0 * options.eps);
      const double ad = analytic.slots[p][i];
      const double err = relative_error(ad, numeric);
      if (err > check.max_rel_error || i == 0) {
        check.max_rel_error = err;
        check.worst_element = i;
        check.analytic = ad;
        check.numeric = numeric;
      }
    }
    report.params.push_back(std::move(check));
  }
  report.passed = finite && report.max_rel_error() <= options.tolerance;
  return report;
}

}  // namespace ssrn::ad
