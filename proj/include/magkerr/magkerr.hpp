#pragma once

#include "magkerr/config.hpp"
#include "magkerr/errors.hpp"
#include "magkerr/model.hpp"
#include "magkerr/parallel.hpp"
#include "magkerr/polynomial.hpp"
#include "magkerr/probe.hpp"
#include "magkerr/steady.hpp"
#include "magkerr/sweep.hpp"
#include "magkerr/table.hpp"
