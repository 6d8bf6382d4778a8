#ifndef SESN_SESN_HPP
#define SESN_SESN_HPP

// Umbrella header for the spatio-temporal echo state network forecasting
// toolkit.

#include "sesn/baselines.hpp"
#include "sesn/bessel.hpp"
#include "sesn/config.hpp"
#include "sesn/covariance.hpp"
#include "sesn/cross_validation.hpp"
#include "sesn/errors.hpp"
#include "sesn/esn.hpp"
#include "sesn/forecast.hpp"
#include "sesn/harmonics.hpp"
#include "sesn/io.hpp"
#include "sesn/knots.hpp"
#include "sesn/kriging.hpp"
#include "sesn/lorenz96.hpp"
#include "sesn/lorenz_study.hpp"
#include "sesn/matern.hpp"
#include "sesn/nelder_mead.hpp"
#include "sesn/parallel.hpp"
#include "sesn/power.hpp"
#include "sesn/rng.hpp"
#include "sesn/space_time_field.hpp"
#include "sesn/synthetic.hpp"
#include "sesn/version.hpp"

#endif  // SESN_SESN_HPP
