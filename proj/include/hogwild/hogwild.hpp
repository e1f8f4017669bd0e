#pragma once

// Umbrella header: asynchronous/filtered SGD simulators, certified step-size
// schedules and convergence envelopes, and the empirical verification suite.

#include "hogwild/data_io.hpp"
#include "hogwild/dataset.hpp"
#include "hogwild/delay.hpp"
#include "hogwild/driver.hpp"
#include "hogwild/objective.hpp"
#include "hogwild/parallel_engine.hpp"
#include "hogwild/partition.hpp"
#include "hogwild/rng.hpp"
#include "hogwild/schedule.hpp"
#include "hogwild/sequential_engine.hpp"
#include "hogwild/trace.hpp"
#include "hogwild/vectors.hpp"
#include "hogwild/verify.hpp"
