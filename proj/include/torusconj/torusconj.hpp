#pragma once

#include "torusconj/circle.hpp"
#include "torusconj/cocycle.hpp"
#include "torusconj/conjugacy.hpp"
#include "torusconj/furstenberg.hpp"
#include "torusconj/json_io.hpp"
#include "torusconj/ktheory.hpp"
#include "torusconj/piecewise.hpp"
#include "torusconj/rokhlin.hpp"
#include "torusconj/shear.hpp"
#include "torusconj/trig.hpp"
#include "torusconj/verify.hpp"
