#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssrn/numcore/graph.hpp"

// Differentiable operations on Graph nodes. Each mirrors a plain kernel in
// matrix.hpp and raises the same errors on bad shapes.
namespace ssrn::ad {

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// s*a + c element-wise.
Var affine(Var a, double s, double c);
/// Adds a 1×n row to every row of an m×n matrix.
Var add_row(Var a, Var row);
/// Multiplies row i of `a` by column[i]; column is m×1.
Var scale_rows(Var a, Var column);

Var sigmoid(Var a);
Var tanh(Var a);
Var softmax_rows(Var a);
Var softmax_cols(Var a);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t first, std::size_t count);
Var slice_cols(Var a, std::size_t first, std::size_t count);
Var pick(Var a, std::size_t r, std::size_t c);

/// Row-wise cosine similarity as an m×1 column; zero-norm rows give 0 and no gradient.
Var cosine_rows(Var a, Var b);
/// Mean over rows, giving a 1×n row.
Var mean_rows(Var a);
Var sum_all(Var a);

/// -log softmax(logits)[target] for a 1×n or n×1 logits node.
Var cross_entropy(Var logits, std::size_t target);
/// Smooth-L1 summed over elements of pred against constant targets.
Var smooth_l1(Var pred, std::span<const double> target);

}  // namespace ssrn::ad
