#pragma once

#include "ptkr/classical.hpp"
#include "ptkr/core.hpp"
#include "ptkr/dynamics.hpp"
#include "ptkr/error.hpp"
#include "ptkr/oracle.hpp"
#include "ptkr/parallel.hpp"
#include "ptkr/spectrum.hpp"
