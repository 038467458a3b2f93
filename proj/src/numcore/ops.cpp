#include "ssrn/numcore/ops.hpp"

#include <algorithm>
#include <cmath>

#include "ssrn/errors.hpp"

namespace ssrn::ad {

namespace {

Graph& same_graph(Var a, Var b, const char* op) {
  if (a.graph == nullptr || a.graph != b.graph)
    throw ContractError(std::string(op) + ": operands belong to different graphs");
  return *a.graph;
}

Matrix map(const Matrix& m, double (*f)(double)) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = f(m[i]);
  return out;
}

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double tanh_scalar(double x) { return std::tanh(x); }

std::size_t vector_length(const Matrix& m, const char* op) {
  if (m.rows() != 1 && m.cols() != 1)
    throw ShapeError(std::string(op) + ": expected a vector, got " + m.shape_string());
  return m.size();
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = same_graph(a, b, "matmul");
  return g.record(num::matmul(a.value(), b.value()), [a = a.id, b = b.id](Graph& g, int self) {
    const Matrix& up = g.grad(self);
    g.accumulate(a, num::matmul(up, num::transpose(g.value(b))));
    g.accumulate(b, num::matmul(num::transpose(g.value(a)), up));
  });
}

Var transpose(Var a) {
  return a.graph->record(num::transpose(a.value()), [a = a.id](Graph& g, int self) {
    g.accumulate(a, num::transpose(g.grad(self)));
  });
}

Var add(Var a, Var b) {
  Graph& g = same_graph(a, b, "add");
  return g.record(num::add(a.value(), b.value()), [a = a.id, b = b.id](Graph& g, int self) {
    const Matrix up = g.grad(self);
    g.accumulate(a, up);
    g.accumulate(b, up);
  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph(a, b, "sub");
  return g.record(num::sub(a.value(), b.value()), [a = a.id, b = b.id](Graph& g, int self) {
    const Matrix up = g.grad(self);
    g.accumulate(a, up);
    g.accumulate_scaled(b, up, -1.0);
  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph(a, b, "mul");
  return g.record(num::mul(a.value(), b.value()), [a = a.id, b = b.id](Graph& g, int self) {
    const Matrix up = g.grad(self);
    g.accumulate(a, num::mul(up, g.value(b)));
    g.accumulate(b, num::mul(up, g.value(a)));
  });
}

Var scale(Var a, double s) { return affine(a, s, 0.0); }

Var affine(Var a, double s, double c) {
  Matrix v = a.value();
  for (double& x : v.data()) x = s * x + c;
  return a.graph->record(std::move(v), [a = a.id, s](Graph& g, int self) {
    g.accumulate_scaled(a, g.grad(self), s);
  });
}

Var add_row(Var a, Var row) {
  Graph& g = same_graph(a, row, "add_row");
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols())
    throw ShapeError("add_row: incompatible shapes " + av.shape_string() + " and " + rv.shape_string());
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv(0, j);
  return g.record(std::move(out), [a = a.id, r = row.id](Graph& g, int self) {
    const Matrix up = g.grad(self);
    Matrix gr(1, up.cols());
    for (std::size_t i = 0; i < up.rows(); ++i)
      for (std::size_t j = 0; j < up.cols(); ++j) gr(0, j) += up(i, j);
    g.accumulate(a, up);
    g.accumulate(r, gr);
  });
}

Var scale_rows(Var a, Var column) {
  Graph& g = same_graph(a, column, "scale_rows");
  const Matrix& av = a.value();
  const Matrix& cv = column.value();
  if (cv.cols() != 1 || cv.rows() != av.rows())
    throw ShapeError("scale_rows: incompatible shapes " + av.shape_string() + " and " + cv.shape_string());
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (double& x : out.row(i)) x *= cv(i, 0);
  return g.record(std::move(out), [a = a.id, c = column.id](Graph& g, int self) {
    const Matrix up = g.grad(self);
    const Matrix& av = g.value(a);
    const Matrix& cv = g.value(c);
    Matrix ga(up.rows(), up.cols());
    Matrix gc(cv.rows(), 1);
    for (std::size_t i = 0; i < up.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < up.cols(); ++j) {
        ga(i, j) = up(i, j) * cv(i, 0);
        acc += up(i, j) * av(i, j);
      }
      gc(i, 0) = acc;
    }
    g.accumulate(a, ga);
    g.accumulate(c, gc);
  });
}

Var sigmoid(Var a) {
  return a.graph->record(map(a.value(), sigmoid_scalar), [a = a.id](Graph& g, int self) {
    const Matrix& y = g.value(self);
    Matrix ga = g.grad(self);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= y[i] * (1.0 - y[i]);
    g.accumulate(a, ga);
  });
}

Var tanh(Var a) {
  return a.graph->record(map(a.value(), tanh_scalar), [a = a.id](Graph& g, int self) {
    const Matrix& y = g.value(self);
    Matrix ga = g.grad(self);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= 1.0 - y[i] * y[i];
    g.accumulate(a, ga);
  });
}

Var softmax_rows(Var a) {
  return a.graph->record(num::softmax_rows(a.value()), [a = a.id](Graph& g, int self) {
    const Matrix& y = g.value(self);
    Matrix ga = g.grad(self);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      auto yr = y.row(i);
      auto gr = ga.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < yr.size(); ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < yr.size(); ++j) gr[j] = yr[j] * (gr[j] - dot);
    }
    g.accumulate(a, ga);
  });
}

Var softmax_cols(Var a) { return transpose(softmax_rows(transpose(a))); }

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Graph& g = *parts.front().graph;
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (Var p : parts) {
    if (p.graph != &g) throw ContractError("concat_cols: operands belong to different graphs");
    if (p.rows() != rows)
      throw ShapeError("concat_cols: incompatible shapes " + parts.front().value().shape_string() +
                       " and " + p.value().shape_string());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::size_t off = 0;
  for (Var p : parts) {
    const Matrix& v = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(v.row(i).begin(), v.row(i).end(), out.row(i).begin() + off);
    off += v.cols();
    ids.push_back(p.id);
  }
  return g.record(std::move(out), [ids = std::move(ids)](Graph& g, int self) {
    const Matrix up = g.grad(self);
    std::size_t off = 0;
    for (int id : ids) {
      const Matrix& v = g.value(id);
      Matrix part(v.rows(), v.cols());
      for (std::size_t i = 0; i < v.rows(); ++i)
        std::copy_n(up.row(i).begin() + off, v.cols(), part.row(i).begin());
      off += v.cols();
      g.accumulate(id, part);
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  Graph& g = *parts.front().graph;
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (Var p : parts) {
    if (p.graph != &g) throw ContractError("concat_rows: operands belong to different graphs");
    if (p.cols() != cols)
      throw ShapeError("concat_rows: incompatible shapes " + parts.front().value().shape_string() +
                       " and " + p.value().shape_string());
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::size_t off = 0;
  for (Var p : parts) {
    const Matrix& v = p.value();
    std::copy(v.data().begin(), v.data().end(), out.data().begin() + off);
    off += v.size();
    ids.push_back(p.id);
  }
  return g.record(std::move(out), [ids = std::move(ids)](Graph& g, int self) {
    const Matrix up = g.grad(self);
    std::size_t off = 0;
    for (int id : ids) {
      const Matrix& v = g.value(id);
      Matrix part(v.rows(), v.cols());
      std::copy_n(up.data().begin() + off, v.size(), part.data().begin());
      off += v.size();
      g.accumulate(id, part);
    }
  });
}

Var slice_rows(Var a, std::size_t first, std::size_t count) {
  const Matrix& v = a.value();
  if (first + count > v.rows())
    throw IndexError("slice_rows: rows [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " + v.shape_string());
  Matrix out(count, v.cols());
  std::copy_n(v.data().begin() + first * v.cols(), count * v.cols(), out.data().begin());
  return a.graph->record(std::move(out), [a = a.id, first](Graph& g, int self) {
    const Matrix& up = g.grad(self);
    const Matrix& v = g.value(a);
    Matrix ga(v.rows(), v.cols());
    std::copy(up.data().begin(), up.data().end(), ga.data().begin() + first * v.cols());
    g.accumulate(a, ga);
  });
}

Var slice_cols(Var a, std::size_t first, std::size_t count) {
  const Matrix& v = a.value();
  if (first + count > v.cols())
    throw IndexError("slice_cols: cols [" + std::to_string(first) + ", " +
                     std::to_string(first + count) + ") out of range for " + v.shape_string());
  Matrix out(v.rows(), count);
  for (std::size_t i = 0; i < v.rows(); ++i)
    std::copy_n(v.row(i).begin() + first, count, out.row(i).begin());
  return a.graph->record(std::move(out), [a = a.id, first](Graph& g, int self) {
    const Matrix& up = g.grad(self);
    const Matrix& v = g.value(a);
    Matrix ga(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.rows(); ++i)
      std::copy(up.row(i).begin(), up.row(i).end(), ga.row(i).begin() + first);
    g.accumulate(a, ga);
  });
}

Var pick(Var a, std::size_t r, std::size_t c) {
  const Matrix& v = a.value();
  if (r >= v.rows() || c >= v.cols())
    throw IndexError("pick: (" + std::to_string(r) + ", " + std::to_string(c) +
                     ") out of range for " + v.shape_string());
  return a.graph->record(Matrix(1, 1, v(r, c)), [a = a.id, r, c](Graph& g, int self) {
    const Matrix& v = g.value(a);
    Matrix ga(v.rows(), v.cols());
    ga(r, c) = g.grad(self)(0, 0);
    g.accumulate(a, ga);
  });
}

Var cosine_rows(Var a, Var b) {
  Graph& g = same_graph(a, b, "cosine_rows");
  const auto sims = num::cosine_rows(a.value(), b.value());
  return g.record(Matrix::column_vector(sims), [a = a.id, b = b.id](Graph& g, int self) {
    const Matrix& up = g.grad(self);
    const Matrix& av = g.value(a);
    const Matrix& bv = g.value(b);
    const Matrix& cv = g.value(self);
    Matrix ga(av.rows(), av.cols());
    Matrix gb(bv.rows(), bv.cols());
    for (std::size_t i = 0; i < av.rows(); ++i) {
      double na = 0.0, nb = 0.0;
      for (std::size_t j = 0; j < av.cols(); ++j) {
        na += av(i, j) * av(i, j);
        nb += bv(i, j) * bv(i, j);
      }
      if (na == 0.0 || nb == 0.0) continue;
      const double ra = std::sqrt(na), rb = std::sqrt(nb);
      const double c = cv(i, 0), u = up(i, 0);
      // d cos / d a = b/(|a||b|) - cos * a/|a|^2, symmetric for b.
      for (std::size_t j = 0; j < av.cols(); ++j) {
        ga(i, j) = u * (bv(i, j) / (ra * rb) - c * av(i, j) / na);
        gb(i, j) = u * (av(i, j) / (ra * rb) - c * bv(i, j) / nb);
      }
    }
    g.accumulate(a, ga);
    g.accumulate(b, gb);
  });
}

Var mean_rows(Var a) {
  const Matrix& v = a.value();
  if (v.rows() == 0) throw ShapeError("mean_rows: empty matrix");
  Matrix out(1, v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) out(0, j) += v(i, j);
  const double inv = 1.0 / static_cast<double>(v.rows());
  for (double& x : out.data()) x *= inv;
  return a.graph->record(std::move(out), [a = a.id, inv](Graph& g, int self) {
    const Matrix& up = g.grad(self);
    const Matrix& v = g.value(a);
    Matrix ga(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) ga(i, j) = up(0, j) * inv;
    g.accumulate(a, ga);
  });
}

Var sum_all(Var a) {
  return a.graph->record(Matrix(1, 1, num::sum(a.value())), [a = a.id](Graph& g, int self) {
    const Matrix& v = g.value(a);
    g.accumulate(a, Matrix(v.rows(), v.cols(), g.grad(self)(0, 0)));
  });
}

Var cross_entropy(Var logits, std::size_t target) {
  const Matrix& v = logits.value();
  vector_length(v, "cross_entropy");
  const double loss = num::cross_entropy(v.data(), target);
  return logits.graph->record(Matrix(1, 1, loss), [l = logits.id, target](Graph& g, int self) {
    const Matrix& v = g.value(l);
    const double up = g.grad(self)(0, 0);
    const double mx = *std::max_element(v.data().begin(), v.data().end());
    Matrix gl(v.rows(), v.cols());
    double z = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      gl[i] = std::exp(v[i] - mx);
      z += gl[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) gl[i] = up * (gl[i] / z - (i == target ? 1.0 : 0.0));
    g.accumulate(l, gl);
  });
}

Var smooth_l1(Var pred, std::span<const double> target) {
  const Matrix& v = pred.value();
  vector_length(v, "smooth_l1");
  const double loss = num::smooth_l1(v.data(), target);
  std::vector<double> t(target.begin(), target.end());
  return pred.graph->record(Matrix(1, 1, loss), [p = pred.id, t = std::move(t)](Graph& g, int self) {
    const Matrix& v = g.value(p);
    const double up = g.grad(self)(0, 0);
    Matrix gp(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] - t[i];
      gp[i] = up * (std::abs(d) < 1.0 ? d : (d > 0 ? 1.0 : -1.0));
    }
    g.accumulate(p, gp);
  });
}

}  // namespace ssrn::ad
