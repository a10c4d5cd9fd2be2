#pragma once

#include "ifs_chisel/errors.hpp"
#include "ifs_chisel/geometry.hpp"
#include "ifs_chisel/ifs.hpp"
#include "ifs_chisel/invariant_region.hpp"
#include "ifs_chisel/discrete_sets.hpp"
#include "ifs_chisel/iteration_engine.hpp"
#include "ifs_chisel/render_io.hpp"
