#pragma once

#include "averages.hpp"
#include "diagnostics.hpp"
#include "discretize.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "kernels.hpp"
#include "line.hpp"
#include "norms.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sequence.hpp"
#include "systems.hpp"
#include "transfer.hpp"
