#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssrn/numcore/matrix.hpp"

namespace ssrn::ad {

using num::Matrix;

/// Named, insertion-ordered collection of trainable matrices.
class ParamStore {
 public:
  std::size_t add(std::string name, Matrix value);
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::size_t size() const noexcept { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Matrix& value(std::size_t i) { return values_[i]; }
  const Matrix& value(std::size_t i) const { return values_[i]; }
  Matrix& value(std::string_view name) { return values_[index_of(name)]; }
  const Matrix& value(std::string_view name) const { return values_[index_of(name)]; }
  std::size_t element_count() const;

  friend bool operator==(const ParamStore& a, const ParamStore& b) {
    return a.names_ == b.names_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Gradients aligned with a ParamStore; slot i belongs to parameter i.
struct Gradients {
  std::vector<Matrix> slots;

  static Gradients zeros_like(const ParamStore& store);
  void accumulate(const Gradients& other, double weight = 1.0);
  void scale(double s);
  bool all_finite() const;
};

class Graph;

/// Handle to a node in a Graph. Cheap to copy; valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Tape of differentiable operations. Nodes are appended in evaluation order, so
/// the reverse of the append order is a valid reverse topological order and the
/// node index is a stable id.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  explicit Graph(const ParamStore* params = nullptr) : params_(params) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Matrix value);
  /// Leaf for a named parameter. Repeated calls return the same node.
  Var param(std::string_view name);

  /// Appends a node whose backward rule reads `grad(self)` and accumulates into
  /// its inputs with `accumulate`.
  Var record(Matrix value, BackwardFn backward);

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  /// Upstream gradient of a node; zero-filled if nothing flowed into it.
  const Matrix& grad(int id);
  void accumulate(int id, const Matrix& g);
  void accumulate_scaled(int id, const Matrix& g, double s);

  /// Reverse sweep from a 1x1 node. Raises ContractError on non-scalar loss.
  void backward(Var loss);
  /// Parameter gradients after backward(); parameters never touched get zeros.
  Gradients param_grads() const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  const ParamStore* params() const noexcept { return params_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    int param_index = -1;
  };

  const ParamStore* params_;
  std::vector<Node> nodes_;
  std::unordered_map<std::size_t, int> param_nodes_;
  bool backward_done_ = false;
};

}  // namespace ssrn::ad
