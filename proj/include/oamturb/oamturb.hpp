#pragma once

#include "oamturb/channel.hpp"
#include "oamturb/entangle.hpp"
#include "oamturb/errors.hpp"
#include "oamturb/experiments.hpp"
#include "oamturb/gauss_legendre.hpp"
#include "oamturb/io.hpp"
#include "oamturb/lgmode.hpp"
#include "oamturb/quadrature.hpp"
#include "oamturb/screen_mc.hpp"
#include "oamturb/turbulence.hpp"
#include "oamturb/version.hpp"
