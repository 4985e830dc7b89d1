#pragma once

#include "dufresne/errors.hpp"
#include "dufresne/special_fn.hpp"
#include "dufresne/random.hpp"
#include "dufresne/law.hpp"
#include "dufresne/param_solver.hpp"
#include "dufresne/stationary.hpp"
#include "dufresne/verifier.hpp"
#include "dufresne/shotnoise.hpp"
#include "dufresne/io.hpp"
