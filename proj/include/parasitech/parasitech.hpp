#pragma once

#include "parasitech/error.hpp"
#include "parasitech/series.hpp"
#include "parasitech/distributions.hpp"
#include "parasitech/stats.hpp"
#include "parasitech/ols.hpp"
#include "parasitech/classify.hpp"
#include "parasitech/logistic.hpp"
#include "parasitech/evolution.hpp"
#include "parasitech/simulate.hpp"
#include "parasitech/io.hpp"
