#pragma once

#include "uwaeq/common.hpp"

namespace uwaeq::fft {

// Thin FFTW wrappers. Plans are cached per length and shared between
// threads; execution itself is reentrant.

// X[k] = sum_n x[n] e^{-j 2 pi n k / N}
void forward(const cd* in, cd* out, std::size_t n);
// x[n] = sum_k X[k] e^{+j 2 pi n k / N}   (no 1/N factor)
void backward(const cd* in, cd* out, std::size_t n);

CVec forward(const CVec& x);
CVec backward(const CVec& x);

}  // namespace uwaeq::fft
