#include "ssrn/numcore/graph.hpp"

#include "ssrn/errors.hpp"

namespace ssrn::ad {

std::size_t ParamStore::add(std::string name, Matrix value) {
  if (index_.count(name)) throw ValidationError("ParamStore: duplicate parameter '" + name + "'");
  const std::size_t i = values_.size();
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return i;
}

bool ParamStore::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

std::size_t ParamStore::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw IndexError("ParamStore: no parameter named '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamStore::element_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

Gradients Gradients::zeros_like(const ParamStore& store) {
  Gradients g;
  g.slots.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i)
    g.slots.emplace_back(store.value(i).rows(), store.value(i).cols());
  return g;
}

void Gradients::accumulate(const Gradients& other, double weight) {
  if (other.slots.size() != slots.size()) throw ShapeError("Gradients: slot count mismatch");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].same_shape(other.slots[i]))
      throw ShapeError("Gradients: slot " + std::to_string(i) + " shapes " +
                       slots[i].shape_string() + " and " + other.slots[i].shape_string());
    auto dst = slots[i].data();
    auto src = other.slots[i].data();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += weight * src[j];
  }
}

void Gradients::scale(double s) {
  for (auto& m : slots)
    for (double& x : m.data()) x *= s;
}

bool Gradients::all_finite() const {
  for (const auto& m : slots)
    if (!m.all_finite()) return false;
  return true;
}

const Matrix& Var::value() const { return graph->value(id); }

Var Graph::constant(Matrix value) { return record(std::move(value), nullptr); }

Var Graph::param(std::string_view name) {
  if (!params_) throw ContractError("Graph: no ParamStore attached for parameter '" + std::string(name) + "'");
  const std::size_t idx = params_->index_of(name);
  if (auto it = param_nodes_.find(idx); it != param_nodes_.end()) return Var{this, it->second};
  Var v = record(params_->value(idx), nullptr);
  nodes_.back().param_index = static_cast<int>(idx);
  param_nodes_.emplace(idx, v.id);
  return v;
}

Var Graph::record(Matrix value, BackwardFn backward) {
  if (backward_done_) throw ContractError("Graph: cannot record after backward()");
  nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward), -1});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

const Matrix& Graph::grad(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty() && !n.value.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::accumulate(int id, const Matrix& g) { accumulate_scaled(id, g, 1.0); }

void Graph::accumulate_scaled(int id, const Matrix& g, double s) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.value.same_shape(g))
    throw ShapeError("Graph: gradient shape " + g.shape_string() + " does not match node " +
                     std::to_string(id) + " shape " + n.value.shape_string());
  if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
  auto dst = n.grad.data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw ContractError("Graph::backward: loss belongs to another graph");
  const Matrix& lv = value(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ContractError("Graph::backward: loss must be 1x1, got " + lv.shape_string());
  if (backward_done_) throw ContractError("Graph::backward: already called");
  backward_done_ = true;
  nodes_[static_cast<std::size_t>(loss.id)].grad = Matrix(1, 1, 1.0);
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backward && !n.grad.empty()) n.backward(*this, id);
  }
}

Gradients Graph::param_grads() const {
  if (!params_) return {};
  Gradients g = Gradients::zeros_like(*params_);
  for (const auto& [idx, node] : param_nodes_) {
    const Matrix& ng = nodes_[static_cast<std::size_t>(node)].grad;
    if (!ng.empty()) g.slots[idx] = ng;
  }
  return g;
}

}  // namespace ssrn::ad
