// Power-series kernels evaluated in log space, so that neither large
// coefficients nor large |z| overflow.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wvlab/types.hpp"

namespace wvlab {

// value = exp(log_scale) * sum
struct ScaledSum {
  Real log_scale;
  Complex sum;
};

// q-th derivative of sum a_n z^n, term-wise differentiated.
ScaledSum series_derivative(std::span<const Complex> coefficients, Complex z, int q);

// Principal-branch log of the series value; real part is -inf at a zero.
Complex series_log(std::span<const Complex> coefficients, Complex z);

// L_q = f^{(q)}/f for q = 1..M. Throws PoleOrZeroAt when f(z) = 0.
std::vector<Complex> series_logderiv_tower(std::span<const Complex> coefficients, Complex z, int M);

struct MaxTerm {
  Real log_mu;  // log of max_n |a_n| r^n
  Real mu;      // may be +inf when log_mu is huge
  std::size_t N;
};

// Maximum term and central index. Terms within a relative 1e-12 of the
// maximum (in log space) count as ties; the largest tied index wins.
MaxTerm max_term_and_central_index(std::span<const Complex> coefficients, Real r);

}  // namespace wvlab
