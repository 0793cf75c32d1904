#pragma once

#include "beslift/besov.hpp"
#include "beslift/counterexamples.hpp"
#include "beslift/errors.hpp"
#include "beslift/grid.hpp"
#include "beslift/haar.hpp"
#include "beslift/io.hpp"
#include "beslift/jacobian.hpp"
#include "beslift/lifting.hpp"
#include "beslift/rng.hpp"
#include "beslift/verify.hpp"
