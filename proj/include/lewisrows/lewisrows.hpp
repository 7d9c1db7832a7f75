#pragma once

#include "lewisrows/bench.hpp"
#include "lewisrows/common.hpp"
#include "lewisrows/generators.hpp"
#include "lewisrows/lewis_convex.hpp"
#include "lewisrows/lewis_iteration.hpp"
#include "lewisrows/linalg.hpp"
#include "lewisrows/matrix_io.hpp"
#include "lewisrows/quad_form.hpp"
#include "lewisrows/recursion.hpp"
#include "lewisrows/sampling.hpp"
#include "lewisrows/sketch.hpp"
#include "lewisrows/verify.hpp"
