#pragma once

#include "bpbound/bounds.hpp"
#include "bpbound/channels.hpp"
#include "bpbound/decoder.hpp"
#include "bpbound/density_evolution.hpp"
#include "bpbound/ensembles.hpp"
#include "bpbound/errors.hpp"
#include "bpbound/experiment.hpp"
#include "bpbound/numeric.hpp"
#include "bpbound/oracle.hpp"
#include "bpbound/rng.hpp"
#include "bpbound/simulation.hpp"
