#include "ssrn/layers.hpp"

#include <cmath>

#include "ssrn/errors.hpp"
#include "ssrn/numcore/ops.hpp"

namespace ssrn {

num::Matrix xavier(std::size_t rows, std::size_t cols, num::Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return num::random_uniform(rows, cols, rng, -limit, limit);
}

LinearParams LinearParams::create(ad::ParamStore& store, std::string prefix, std::size_t in,
                                  std::size_t out, num::Rng& rng) {
  LinearParams p{std::move(prefix), in, out};
  store.add(p.weight(), xavier(in, out, rng));
  store.add(p.bias(), num::Matrix(1, out));
  return p;
}

ad::Var LinearParams::forward(ad::Graph& g, ad::Var x) const {
  if (x.cols() != in)
    throw ShapeError(prefix + ": input " + x.value().shape_string() + " does not match weight " +
                     std::to_string(in) + "x" + std::to_string(out));
  return ad::add_row(ad::matmul(x, g.param(weight())), g.param(bias()));
}

}  // namespace ssrn
