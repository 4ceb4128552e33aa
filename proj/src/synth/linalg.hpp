#pragma once

#include "common/mat.hpp"

namespace hmmvae::synth {

// smallest singular value of a small dense matrix (rows >= cols), via Jacobi
// eigenvalue sweeps on M^T M; intended for the tiny mixing matrices here
double smallest_singular_value(const Mat& m);

}  // namespace hmmvae::synth
