#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace hmmvae::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a backward pass touches it
  bool tracked = false;      // accumulates gradient (parameter or recorded op output)
  int node = -1;             // producing tape node, -1 for leaves
};

// Shared handle to a dense 64-bit array. Copies alias the same storage, so a
// parameter tensor can live in a model struct and in an optimizer at once.
class Tensor {
 public:
  Tensor() : data_(std::make_shared<TensorData>()) {}

  static Tensor constant(Shape shape, std::vector<double> value);
  static Tensor scalar(double v) { return constant({}, {v}); }
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);
  // trainable leaf: participates in gradient accumulation
  static Tensor param(Shape shape, std::vector<double> value);

  const Shape& shape() const { return data_->shape; }
  std::size_t rank() const { return data_->shape.size(); }
  std::size_t numel() const { return data_->value.size(); }

  const std::vector<double>& value() const { return data_->value; }
  std::vector<double>& mutable_value() { return data_->value; }
  double value_at(std::size_t i) const { return data_->value[i]; }
  double scalar_value() const;  // requires numel() == 1

  bool tracked() const { return data_->tracked; }
  double grad_at(std::size_t i) const;
  std::vector<double> grad() const;  // dense copy; zeros if backward never reached this tensor
  void zero_grad() { data_->grad.clear(); }

  const std::shared_ptr<TensorData>& data() const { return data_; }

 private:
  explicit Tensor(std::shared_ptr<TensorData> d) : data_(std::move(d)) {}
  std::shared_ptr<TensorData> data_;

  friend Tensor make_op_output(Shape shape, std::vector<double> value, bool track);
};

// Creates the output tensor of an operation. When `track` is true the caller
// must record a tape node for it (see Tape::record).
Tensor make_op_output(Shape shape, std::vector<double> value, bool track);

}  // namespace hmmvae::ad
