#pragma once

#include "cayley_gibbs/special_functions.hpp"
#include "cayley_gibbs/field_pair.hpp"
#include "cayley_gibbs/scheme.hpp"
#include "cayley_gibbs/solver.hpp"
#include "cayley_gibbs/tree_boundary.hpp"
#include "cayley_gibbs/gibbs_oracle.hpp"
#include "cayley_gibbs/extremality.hpp"
#include "cayley_gibbs/sweep.hpp"
#include "cayley_gibbs/report.hpp"
