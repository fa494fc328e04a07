#pragma once

#include "thinpred/errors.hpp"
#include "thinpred/series.hpp"
#include "thinpred/sampling.hpp"
#include "thinpred/ordinal.hpp"
#include "thinpred/infotheory.hpp"
#include "thinpred/theory.hpp"
#include "thinpred/linalg.hpp"
#include "thinpred/synth.hpp"
#include "thinpred/format.hpp"
#include "thinpred/forecast.hpp"
#include "thinpred/diagnostics.hpp"
#include "thinpred/harness.hpp"
#include "thinpred/fixtures.hpp"
