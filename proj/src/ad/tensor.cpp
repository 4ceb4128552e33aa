#include "ad/tensor.hpp"

#include <stdexcept>

namespace hmmvae::ad {

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor Tensor::constant(Shape shape, std::vector<double> value) {
  if (shape_numel(shape) != value.size())
    throw std::invalid_argument("tensor: value length " + std::to_string(value.size()) +
                                " does not match shape " + shape_str(shape));
  auto d = std::make_shared<TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(value);
  return Tensor(std::move(d));
}

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double v) {
  std::vector<double> value(shape_numel(shape), v);
  return constant(std::move(shape), std::move(value));
}

Tensor Tensor::param(Shape shape, std::vector<double> value) {
  Tensor t = constant(std::move(shape), std::move(value));
  t.data_->tracked = true;
  return t;
}

double Tensor::scalar_value() const {
  if (numel() != 1) throw std::invalid_argument("tensor: scalar_value on shape " + shape_str(shape()));
  return data_->value[0];
}

double Tensor::grad_at(std::size_t i) const {
  if (i >= numel()) throw std::out_of_range("tensor: grad index out of range");
  return data_->grad.empty() ? 0.0 : data_->grad[i];
}

std::vector<double> Tensor::grad() const {
  if (data_->grad.empty()) return std::vector<double>(numel(), 0.0);
  return data_->grad;
}

Tensor make_op_output(Shape shape, std::vector<double> value, bool track) {
  Tensor t = Tensor::constant(std::move(shape), std::move(value));
  t.data_->tracked = track;
  return t;
}

}  // namespace hmmvae::ad
