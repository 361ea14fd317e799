#pragma once

#include "acquisition.hpp"
#include "baselines.hpp"
#include "bayes_line_search.hpp"
#include "errors.hpp"
#include "gp.hpp"
#include "kde.hpp"
#include "lbfgs.hpp"
#include "objective.hpp"
#include "outcome.hpp"
#include "wolfe.hpp"
