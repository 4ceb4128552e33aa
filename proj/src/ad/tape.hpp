#pragma once

#include <functional>
#include <vector>

#include "ad/tensor.hpp"

namespace hmmvae::ad {

// Reverse-mode tape, rebuilt for every training step (define-by-run). Ops
// record one node per output; backward() walks the nodes in reverse.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // RAII activation on the current thread; nesting restores the outer tape
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

  static Tape* active();

  // registers a node producing `out`; `backward` must accumulate into the
  // node's input gradients, reading the output gradient from out's buffer
  void record(const Tensor& out, std::function<void()> backward);

  // Reverse pass from a scalar loss. Intermediate gradients are reset
  // internally each call; leaf gradients accumulate across calls, so the
  // pass is idempotent once leaves are reset.
  void backward(const Tensor& loss);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    std::shared_ptr<TensorData> out;
    std::function<void()> backward;
  };
  std::vector<Node> nodes_;
};

// true when a tape is active on this thread
bool recording();

// Lazily allocated gradient buffer; nullptr when `t` does not participate in
// gradient accumulation.
double* grad_ptr(TensorData& t);

}  // namespace hmmvae::ad
