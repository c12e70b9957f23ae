#pragma once
// Everything at once.

#include "bernstein.hpp"
#include "checks.hpp"
#include "config.hpp"
#include "criticality.hpp"
#include "hardy.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "runner.hpp"
#include "spectral.hpp"
#include "wave.hpp"
