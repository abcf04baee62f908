#pragma once

#include "randwave/errors.hpp"
#include "randwave/specfun.hpp"
#include "randwave/quadrature.hpp"
#include "randwave/rng.hpp"
#include "randwave/chaos.hpp"
#include "randwave/sphere.hpp"
#include "randwave/geomstats.hpp"
#include "randwave/torus.hpp"
#include "randwave/oracles.hpp"
#include "randwave/kernels.hpp"
#include "randwave/harness.hpp"
#include "randwave/acceptance.hpp"
