#pragma once

#include "mtors/core.hpp"

#include <utility>
#include <vector>

namespace mtors {

// Prime factorization by trial division and Pollard-Brent.  Cofactors that
// resist `budget` iterations are returned unsplit with exponent 1.
std::vector<std::pair<Integer, unsigned>> factor(const Integer& n, unsigned long budget = 2000000);

}  // namespace mtors
