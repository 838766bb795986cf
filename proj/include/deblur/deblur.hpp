#pragma once

// Umbrella header for the gradient-domain blind-deconvolution toolkit.

#include "deblur/analysis.hpp"
#include "deblur/apps.hpp"
#include "deblur/canny.hpp"
#include "deblur/convolve.hpp"
#include "deblur/deconv.hpp"
#include "deblur/defocus.hpp"
#include "deblur/energy.hpp"
#include "deblur/estimate.hpp"
#include "deblur/image.hpp"
#include "deblur/io.hpp"
#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/matting.hpp"
#include "deblur/params.hpp"
#include "deblur/penalty.hpp"
#include "deblur/poisson.hpp"
#include "deblur/synthetic.hpp"
