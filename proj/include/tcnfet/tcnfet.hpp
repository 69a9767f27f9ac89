/*!
  \file tcnfet.hpp
  \brief Convenience header for the whole library
*/

#pragma once

#include "core.hpp"
#include "device.hpp"
#include "netlist.hpp"
#include "sim.hpp"
#include "stdlib.hpp"
