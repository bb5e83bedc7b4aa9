#pragma once

#include "error.hpp"
#include "measures.hpp"
#include "models.hpp"
#include "expression.hpp"
#include "functionals.hpp"
#include "transport.hpp"
#include "stationary.hpp"
#include "inequalities.hpp"
#include "flow.hpp"
#include "io.hpp"
