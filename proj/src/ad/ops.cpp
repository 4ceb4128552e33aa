#include "ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ad/tape.hpp"

namespace hmmvae::ad {

namespace {

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

struct BinShapes {
  Shape out;
};

BinShapes binary_shapes(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return {a.shape()};
  if (is_suffix(b.shape(), a.shape())) return {a.shape()};
  if (is_suffix(a.shape(), b.shape())) return {b.shape()};
  throw std::invalid_argument(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                              shape_str(b.shape()) + " do not broadcast");
}

double stable_softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// shared skeleton for elementwise unary ops; `fd(x, y)` is d out/d in given
// the input x and output y
template <class FV, class FD>
Tensor unary_op(const Tensor& a, FV fv, FD fd) {
  const auto& av = a.value();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fv(av[i]);
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(a.shape(), std::move(out), track);
  if (track) {
    auto in = a.data();
    auto od = res.data();
    Tape::active()->record(res, [in, od, fd]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*in);
      if (!ga) return;
      const auto& g = od->grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += fd(in->value[i], od->value[i]) * g[i];
    });
  }
  return res;
}

// shared skeleton for elementwise binary ops with trailing-suffix broadcast;
// fa/fb are the partials w.r.t. each operand given both operand values
template <class FV, class FA, class FB>
Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, FV fv, FA fa, FB fb) {
  BinShapes bs = binary_shapes(name, a, b);
  const auto& av = a.value();
  const auto& bv = b.value();
  const std::size_t n = shape_numel(bs.out), na = av.size(), nb = bv.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fv(av[i % na], bv[i % nb]);
  const bool track = recording() && (a.tracked() || b.tracked());
  Tensor res = make_op_output(std::move(bs.out), std::move(out), track);
  if (track) {
    auto da = a.data();
    auto db = b.data();
    auto od = res.data();
    Tape::active()->record(res, [da, db, od, fa, fb, na, nb]() {
      if (od->grad.empty()) return;
      const auto& g = od->grad;
      double* ga = grad_ptr(*da);
      double* gb = grad_ptr(*db);
      if (!ga && !gb) return;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = da->value[i % na];
        const double y = db->value[i % nb];
        if (ga) ga[i % na] += fa(x, y) * g[i];
        if (gb) gb[i % nb] += fb(x, y) * g[i];
      }
    });
  }
  return res;
}

// outer * len * inner decomposition of one axis for reductions
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
  Shape out_shape;
};

AxisSplit axis_split(const char* op, const Tensor& a, std::size_t axis) {
  if (axis >= a.rank())
    throw std::invalid_argument(std::string(op) + ": axis " + std::to_string(axis) +
                                " out of range for shape " + shape_str(a.shape()));
  AxisSplit s;
  const Shape& sh = a.shape();
  for (std::size_t i = 0; i < axis; ++i) s.outer *= sh[i];
  s.len = sh[axis];
  for (std::size_t i = axis + 1; i < sh.size(); ++i) s.inner *= sh[i];
  s.out_shape = sh;
  s.out_shape.erase(s.out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  return s;
}

}  // namespace

Tensor neg(const Tensor& a) {
  return unary_op(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor exp(const Tensor& a) {
  return unary_op(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  for (double v : a.value())
    if (v <= 0.0) throw std::domain_error("log: non-positive input " + std::to_string(v));
  return unary_op(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  for (double v : a.value())
    if (v < 0.0) throw std::domain_error("sqrt: negative input " + std::to_string(v));
  return unary_op(a, [](double x) { return std::sqrt(x); },
                  [](double, double y) { return 0.5 / y; });
}

Tensor square(const Tensor& a) {
  return unary_op(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor tanh(const Tensor& a) {
  return unary_op(a, [](double x) { return std::tanh(x); },
                  [](double, double y) { return 1.0 - y * y; });
}

Tensor sinh(const Tensor& a) {
  return unary_op(a, [](double x) { return std::sinh(x); },
                  [](double x, double) { return std::cosh(x); });
}

Tensor asinh(const Tensor& a) {
  return unary_op(a, [](double x) { return std::asinh(x); },
                  [](double x, double) { return 1.0 / std::sqrt(1.0 + x * x); });
}

Tensor cosh(const Tensor& a) {
  return unary_op(a, [](double x) { return std::cosh(x); },
                  [](double x, double) { return std::sinh(x); });
}

Tensor softplus(const Tensor& a) {
  return unary_op(a, [](double x) { return stable_softplus(x); },
                  [](double x, double) { return sigmoid(x); });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op("add", a, b, [](double x, double y) { return x + y; },
                   [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op("sub", a, b, [](double x, double y) { return x - y; },
                   [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op("mul", a, b, [](double x, double y) { return x * y; },
                   [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  for (double v : b.value())
    if (v == 0.0) throw std::domain_error("div: division by zero");
  return binary_op("div", a, b, [](double x, double y) { return x / y; },
                   [](double, double y) { return 1.0 / y; },
                   [](double x, double y) { return -x / (y * y); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw std::invalid_argument("matmul: rank-2 operands required, got " + shape_str(a.shape()) +
                                " and " + shape_str(b.shape()));
  const std::size_t r = a.shape()[0], k = a.shape()[1], c = b.shape()[1];
  if (b.shape()[0] != k)
    throw std::invalid_argument("matmul: inner extents disagree, " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  const auto& av = a.value();
  const auto& bv = b.value();
  std::vector<double> out(r * c, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const double x = av[i * k + l];
      for (std::size_t j = 0; j < c; ++j) out[i * c + j] += x * bv[l * c + j];
    }
  const bool track = recording() && (a.tracked() || b.tracked());
  Tensor res = make_op_output({r, c}, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto db = b.data();
    auto od = res.data();
    Tape::active()->record(res, [da, db, od, r, k, c]() {
      if (od->grad.empty()) return;
      const auto& g = od->grad;
      double* ga = grad_ptr(*da);
      double* gb = grad_ptr(*db);
      if (ga)  // dA = G * B^T
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t l = 0; l < k; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += g[i * c + j] * db->value[l * c + j];
            ga[i * k + l] += acc;
          }
      if (gb)  // dB = A^T * G
        for (std::size_t l = 0; l < k; ++l)
          for (std::size_t j = 0; j < c; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r; ++i) acc += da->value[i * k + l] * g[i * c + j];
            gb[l * c + j] += acc;
          }
    });
  }
  return res;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2)
    throw std::invalid_argument("transpose: rank-2 operand required, got " + shape_str(a.shape()));
  const std::size_t r = a.shape()[0], c = a.shape()[1];
  const auto& av = a.value();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({c, r}, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, r, c]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += od->grad[j * r + i];
    });
  }
  return res;
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value()) s += v;
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({}, {s}, track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      const double g = od->grad[0];
      for (std::size_t i = 0; i < da->value.size(); ++i) ga[i] += g;
    });
  }
  return res;
}

Tensor sum(const Tensor& a, std::size_t axis) {
  AxisSplit s = axis_split("sum", a, axis);
  const auto& av = a.value();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t l = 0; l < s.len; ++l)
      for (std::size_t i = 0; i < s.inner; ++i)
        out[o * s.inner + i] += av[(o * s.len + l) * s.inner + i];
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(s.out_shape, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, s]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t l = 0; l < s.len; ++l)
          for (std::size_t i = 0; i < s.inner; ++i)
            ga[(o * s.len + l) * s.inner + i] += od->grad[o * s.inner + i];
    });
  }
  return res;
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw std::invalid_argument("mean: empty tensor");
  return mul(sum(a), Tensor::scalar(1.0 / static_cast<double>(a.numel())));
}

Tensor mean(const Tensor& a, std::size_t axis) {
  AxisSplit s = axis_split("mean", a, axis);
  if (s.len == 0) throw std::invalid_argument("mean: empty axis");
  return mul(sum(a, axis), Tensor::scalar(1.0 / static_cast<double>(s.len)));
}

Tensor max(const Tensor& a) {
  if (a.numel() == 0) throw std::invalid_argument("max: empty tensor");
  const auto& av = a.value();
  std::size_t arg = 0;
  for (std::size_t i = 1; i < av.size(); ++i)
    if (av[i] > av[arg]) arg = i;  // ties keep the first index
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({}, {av[arg]}, track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, arg]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (ga) ga[arg] += od->grad[0];
    });
  }
  return res;
}

Tensor max(const Tensor& a, std::size_t axis) {
  AxisSplit s = axis_split("max", a, axis);
  if (s.len == 0) throw std::invalid_argument("max: empty axis");
  const auto& av = a.value();
  std::vector<double> out(s.outer * s.inner);
  std::vector<std::size_t> args(s.outer * s.inner, 0);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      std::size_t arg = 0;
      double best = av[(o * s.len) * s.inner + i];
      for (std::size_t l = 1; l < s.len; ++l) {
        const double v = av[(o * s.len + l) * s.inner + i];
        if (v > best) {
          best = v;
          arg = l;
        }
      }
      out[o * s.inner + i] = best;
      args[o * s.inner + i] = arg;
    }
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(s.out_shape, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, s, args]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i)
          ga[(o * s.len + args[o * s.inner + i]) * s.inner + i] += od->grad[o * s.inner + i];
    });
  }
  return res;
}

Tensor logsumexp(const Tensor& a, std::size_t axis) {
  AxisSplit s = axis_split("logsumexp", a, axis);
  if (s.len == 0) throw std::invalid_argument("logsumexp: empty axis");
  const auto& av = a.value();
  std::vector<double> out(s.outer * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      double m = av[(o * s.len) * s.inner + i];
      for (std::size_t l = 1; l < s.len; ++l)
        m = std::max(m, av[(o * s.len + l) * s.inner + i]);
      double acc = 0.0;
      for (std::size_t l = 0; l < s.len; ++l)
        acc += std::exp(av[(o * s.len + l) * s.inner + i] - m);
      out[o * s.inner + i] = m + std::log(acc);
    }
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(s.out_shape, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, s]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < s.inner; ++i) {
          const double g = od->grad[o * s.inner + i];
          const double lse = od->value[o * s.inner + i];
          for (std::size_t l = 0; l < s.len; ++l) {
            const std::size_t idx = (o * s.len + l) * s.inner + i;
            ga[idx] += g * std::exp(da->value[idx] - lse);
          }
        }
    });
  }
  return res;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel())
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) + " as " +
                                shape_str(shape));
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(std::move(shape), a.value(), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t i = 0; i < od->grad.size(); ++i) ga[i] += od->grad[i];
    });
  }
  return res;
}

Tensor row(const Tensor& a, std::size_t r) {
  if (a.rank() != 2) throw std::invalid_argument("row: rank-2 operand required");
  const std::size_t rows = a.shape()[0], cols = a.shape()[1];
  if (r >= rows) throw std::out_of_range("row: index out of range");
  const auto& av = a.value();
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(r * cols),
                          av.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({cols}, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, r, cols]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t j = 0; j < cols; ++j) ga[r * cols + j] += od->grad[j];
    });
  }
  return res;
}

Tensor col(const Tensor& a, std::size_t c) {
  if (a.rank() != 2) throw std::invalid_argument("col: rank-2 operand required");
  const std::size_t rows = a.shape()[0], cols = a.shape()[1];
  if (c >= cols) throw std::out_of_range("col: index out of range");
  const auto& av = a.value();
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = av[i * cols + c];
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({rows}, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, c, rows, cols]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t i = 0; i < rows; ++i) ga[i * cols + c] += od->grad[i];
    });
  }
  return res;
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
  if (a.rank() == 0) throw std::invalid_argument("slice_rows: rank >= 1 required");
  const std::size_t lead = a.shape()[0];
  if (start + count > lead) throw std::out_of_range("slice_rows: range out of bounds");
  const std::size_t stride = a.numel() / std::max<std::size_t>(lead, 1);
  const auto& av = a.value();
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(start * stride),
                          av.begin() + static_cast<std::ptrdiff_t>((start + count) * stride));
  Shape sh = a.shape();
  sh[0] = count;
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output(std::move(sh), std::move(out), track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, start, stride]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (!ga) return;
      for (std::size_t i = 0; i < od->grad.size(); ++i) ga[start * stride + i] += od->grad[i];
    });
  }
  return res;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1)
    throw std::invalid_argument("concat: rank-1 operands required");
  const auto& av = a.value();
  const auto& bv = b.value();
  std::vector<double> out;
  out.reserve(av.size() + bv.size());
  out.insert(out.end(), av.begin(), av.end());
  out.insert(out.end(), bv.begin(), bv.end());
  const bool track = recording() && (a.tracked() || b.tracked());
  Tensor res = make_op_output({av.size() + bv.size()}, std::move(out), track);
  if (track) {
    auto da = a.data();
    auto db = b.data();
    auto od = res.data();
    const std::size_t na = av.size();
    Tape::active()->record(res, [da, db, od, na]() {
      if (od->grad.empty()) return;
      if (double* ga = grad_ptr(*da))
        for (std::size_t i = 0; i < na; ++i) ga[i] += od->grad[i];
      if (double* gb = grad_ptr(*db))
        for (std::size_t i = na; i < od->grad.size(); ++i) gb[i - na] += od->grad[i];
    });
  }
  return res;
}

Tensor stack_cols(const std::vector<Tensor>& cols) {
  if (cols.empty()) throw std::invalid_argument("stack_cols: no columns");
  const std::size_t t = cols[0].numel();
  bool any_tracked = false;
  for (const auto& c : cols) {
    if (c.rank() != 1 || c.numel() != t)
      throw std::invalid_argument("stack_cols: columns must be rank-1 of equal length");
    any_tracked = any_tracked || c.tracked();
  }
  const std::size_t k = cols.size();
  std::vector<double> out(t * k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& cv = cols[j].value();
    for (std::size_t i = 0; i < t; ++i) out[i * k + j] = cv[i];
  }
  const bool track = recording() && any_tracked;
  Tensor res = make_op_output({t, k}, std::move(out), track);
  if (track) {
    std::vector<std::shared_ptr<TensorData>> ds;
    ds.reserve(k);
    for (const auto& c : cols) ds.push_back(c.data());
    auto od = res.data();
    Tape::active()->record(res, [ds, od, t, k]() {
      if (od->grad.empty()) return;
      for (std::size_t j = 0; j < k; ++j) {
        double* gc = grad_ptr(*ds[j]);
        if (!gc) continue;
        for (std::size_t i = 0; i < t; ++i) gc[i] += od->grad[i * k + j];
      }
    });
  }
  return res;
}

Tensor element(const Tensor& a, std::size_t flat_index) {
  if (flat_index >= a.numel()) throw std::out_of_range("element: index out of range");
  const bool track = recording() && a.tracked();
  Tensor res = make_op_output({}, {a.value()[flat_index]}, track);
  if (track) {
    auto da = a.data();
    auto od = res.data();
    Tape::active()->record(res, [da, od, flat_index]() {
      if (od->grad.empty()) return;
      double* ga = grad_ptr(*da);
      if (ga) ga[flat_index] += od->grad[0];
    });
  }
  return res;
}

}  // namespace hmmvae::ad
