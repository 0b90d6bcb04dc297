#pragma once

#include "fhmix/error.hpp"
#include "fhmix/gaussian.hpp"
#include "fhmix/mixture.hpp"
#include "fhmix/montecarlo.hpp"
#include "fhmix/parallel.hpp"
#include "fhmix/sequence.hpp"
#include "fhmix/series.hpp"
#include "fhmix/truncation.hpp"
#include "fhmix/version.hpp"
