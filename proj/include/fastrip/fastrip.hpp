#pragma once

#include "fastrip/bench.hpp"
#include "fastrip/chain_spec.hpp"
#include "fastrip/config.hpp"
#include "fastrip/errors.hpp"
#include "fastrip/linalg.hpp"
#include "fastrip/opcount.hpp"
#include "fastrip/operators.hpp"
#include "fastrip/prng.hpp"
#include "fastrip/recovery.hpp"
#include "fastrip/rip.hpp"
#include "fastrip/transforms.hpp"
