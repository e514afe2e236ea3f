#pragma once

#include "core.hpp"
#include "spectral_beam.hpp"
#include "spectral_torsion.hpp"
#include "stationary.hpp"
#include "ode.hpp"
#include "duffing_hill.hpp"
#include "galerkin_beam.hpp"
#include "fishbone.hpp"
