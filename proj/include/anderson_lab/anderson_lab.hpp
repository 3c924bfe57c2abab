#pragma once

#include "anderson_lab/cli.hpp"
#include "anderson_lab/config.hpp"
#include "anderson_lab/estimators.hpp"
#include "anderson_lab/experiments.hpp"
#include "anderson_lab/measures.hpp"
#include "anderson_lab/parallel.hpp"
#include "anderson_lab/persist.hpp"
#include "anderson_lab/rng.hpp"
#include "anderson_lab/signed_log.hpp"
#include "anderson_lab/spectral.hpp"
#include "anderson_lab/stats.hpp"
#include "anderson_lab/transfer.hpp"
