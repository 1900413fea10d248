#pragma once

#include "fcl/network.hpp"
#include "fcl/kinetics.hpp"
#include "fcl/polynomial.hpp"
#include "fcl/steady_state.hpp"
#include "fcl/stability.hpp"
#include "fcl/dynamics.hpp"
#include "fcl/bifurcation.hpp"
#include "fcl/oracle.hpp"
#include "fcl/config.hpp"
#include "fcl/io.hpp"
#include "fcl/parallel.hpp"
