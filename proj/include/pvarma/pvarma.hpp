#pragma once

#include "pvarma/arma.hpp"
#include "pvarma/arma_model.hpp"
#include "pvarma/chi_squared.hpp"
#include "pvarma/diagnostics.hpp"
#include "pvarma/evaluation.hpp"
#include "pvarma/json_io.hpp"
#include "pvarma/likelihood.hpp"
#include "pvarma/model_selector.hpp"
#include "pvarma/nelder_mead.hpp"
#include "pvarma/random.hpp"
#include "pvarma/scenario.hpp"
#include "pvarma/series_store.hpp"
#include "pvarma/synthetic.hpp"
