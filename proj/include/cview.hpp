#pragma once

#include "cview/bitset.hpp"
#include "cview/config.hpp"
#include "cview/errors.hpp"
#include "cview/experiment.hpp"
#include "cview/explain.hpp"
#include "cview/export.hpp"
#include "cview/formal_context.hpp"
#include "cview/lattice.hpp"
#include "cview/mvcontext.hpp"
#include "cview/reduce.hpp"
#include "cview/rng.hpp"
#include "cview/tree.hpp"
#include "cview/views.hpp"
