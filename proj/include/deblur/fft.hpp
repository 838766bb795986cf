#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "deblur/image.hpp"

namespace deblur {
namespace detail {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Forward 2D real-to-complex transform; output is h rows of (w/2 + 1) bins.
inline std::vector<std::complex<double>> fft2_r2c(const Image& in) {
  const int w = in.width, h = in.height;
  const int wc = w / 2 + 1;
  std::vector<double> buf(in.data);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * wc);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_2d(h, w, buf.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Inverse of fft2_r2c, normalized by w*h. Destroys `freq`.
inline Image ifft2_c2r(std::vector<std::complex<double>>& freq, int w, int h) {
  Image out(w, h);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_c2r_2d(h, w, reinterpret_cast<fftw_complex*>(freq.data()),
                                out.data.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / (static_cast<double>(w) * h);
  for (double& v : out.data) v *= scale;
  return out;
}

}  // namespace detail
}  // namespace deblur
