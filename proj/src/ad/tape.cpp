#include "ad/tape.hpp"

#include <stdexcept>

namespace hmmvae::ad {

namespace {
thread_local Tape* t_active = nullptr;
}

Tape::Scope::Scope(Tape& tape) : prev_(t_active) { t_active = &tape; }
Tape::Scope::~Scope() { t_active = prev_; }

Tape* Tape::active() { return t_active; }

bool recording() { return t_active != nullptr; }

double* grad_ptr(TensorData& t) {
  if (!t.tracked) return nullptr;
  if (t.grad.empty()) t.grad.assign(t.value.size(), 0.0);
  return t.grad.data();
}

void Tape::record(const Tensor& out, std::function<void()> backward) {
  out.data()->node = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{out.data(), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw std::invalid_argument("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
  if (loss.data()->node < 0 && !loss.tracked())
    throw std::invalid_argument("backward: loss is not connected to the active tape");

  // reset intermediate gradients so repeated passes stay idempotent
  for (auto& n : nodes_) n.out->grad.clear();

  loss.data()->grad.assign(1, 1.0);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
}

}  // namespace hmmvae::ad
