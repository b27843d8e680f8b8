#pragma once

#include "margmap/bench.hpp"
#include "margmap/errors.hpp"
#include "margmap/generate.hpp"
#include "margmap/heuristic.hpp"
#include "margmap/inference.hpp"
#include "margmap/model.hpp"
#include "margmap/oracle.hpp"
#include "margmap/potential.hpp"
#include "margmap/random.hpp"
#include "margmap/uai.hpp"
