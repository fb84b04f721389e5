#pragma once

// Umbrella header.

#include "wbg/errors.hpp"
#include "wbg/finite_diff.hpp"
#include "wbg/fisher.hpp"
#include "wbg/flow.hpp"
#include "wbg/jet.hpp"
#include "wbg/logit.hpp"
#include "wbg/matrix2.hpp"
#include "wbg/polynomial.hpp"
#include "wbg/quadrature.hpp"
#include "wbg/report.hpp"
#include "wbg/roots.hpp"
#include "wbg/verification.hpp"
#include "wbg/weibull.hpp"
