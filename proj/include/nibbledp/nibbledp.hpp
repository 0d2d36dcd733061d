#pragma once

#include "nibbledp/colour_set.hpp"
#include "nibbledp/colouring.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/diagnostics.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/finisher.hpp"
#include "nibbledp/graph.hpp"
#include "nibbledp/io.hpp"
#include "nibbledp/nibble.hpp"
#include "nibbledp/oracle.hpp"
#include "nibbledp/params.hpp"
#include "nibbledp/pipeline.hpp"
#include "nibbledp/rng.hpp"
#include "nibbledp/trace.hpp"
