#pragma once

#include "msstab/analytic_oracle.hpp"
#include "msstab/elliptic.hpp"
#include "msstab/error.hpp"
#include "msstab/geometry.hpp"
#include "msstab/second_variation.hpp"
#include "msstab/stability.hpp"
#include "msstab/variation_validator.hpp"
