#ifndef TOPOCHAIN_TOPOCHAIN_HPP
#define TOPOCHAIN_TOPOCHAIN_HPP

#include "topochain/circuit.hpp"
#include "topochain/dynamics.hpp"
#include "topochain/errors.hpp"
#include "topochain/lattice.hpp"
#include "topochain/pumping.hpp"
#include "topochain/random.hpp"
#include "topochain/spectral.hpp"
#include "topochain/version.hpp"

#endif
