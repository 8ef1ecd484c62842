#pragma once

#include "smacsim/config.hpp"
#include "smacsim/diagnostics.hpp"
#include "smacsim/env.hpp"
#include "smacsim/policy.hpp"
#include "smacsim/record.hpp"
#include "smacsim/regression.hpp"
